"""What is the dollar of Mexico?

Each country is a record: role keys (name, capital, currency) bound to
their fillers with local circular convolution and superposed. Binding the
inverse of one record to another gives a transform that carries fillers
across; applying it to "dollar" lands near "peso".
"""

from sparsevsa.binding import lcc_unbind
from sparsevsa.core import cleanup
from sparsevsa.reasoning import countries_path, load_knowledge

kb = load_knowledge(countries_path(), N=2048, seed=0)
schema = kb.schema
print(f"{len(kb.records)} records, {schema.R} roles, N={schema.N}, K={schema.K} blocks")

# a record answers role queries directly
usa = kb.records["ustates"]
got = lcc_unbind(usa.acc, schema.key("capital"))
idx, score = cleanup(got, schema.codebooks["capital"].columns)
print(f"capital of ustates -> {schema.fillers['capital'][idx]} (cosine {score:.2f})")

# the analogy ranks every filler of every role
print("\ndollar : ustates :: ? : mexico")
for name, overlap in kb.analogy("dollar", "ustates", "mexico")[:5]:
    print(f"  {name:12s} overlap {overlap:6.1f}")

print("\nwashington : ustates :: ? : japan")
print("  ->", kb.analogy("washington", "ustates", "japan")[0][0])
