"""Vector symbolic architectures over dense and sparse block codes."""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    Accumulator,
    BlockCodeVector,
    Codebook,
    DenseVector,
    SparseVector,
    block_code_entropy,
    cleanup,
    gen_block_code,
    gen_dense,
    gen_sparse,
    normalize_blockwise,
    normalize_topk,
    sign,
    similarity,
    superpose,
)
from .binding import (  # noqa: E402
    Permutation,
    SamplingTensor,
    build_sampling_tensor,
    circular_convolve,
    circular_correlate,
    clip,
    hadamard_bind,
    hadamard_unbind,
    lcc_bind,
    lcc_inverse,
    lcc_unbind,
    min_fanin,
    permute_protect,
    protected_sum,
    sptp_bind,
    sptp_bind_phasor,
    sptp_unbind,
)
from .cs import (  # noqa: E402
    BoxDot,
    LassoConfig,
    boxdot,
    compress,
    estimate_rip,
    lasso_solve,
    spark_witness,
    vsa_readout,
)
from .reasoning import (  # noqa: E402
    RoleSchema,
    encode_record,
    load_knowledge,
    make_transform,
    predict_accuracy,
    query,
    run_capacity_experiment,
)
from .classify import (  # noqa: E402
    LevelEncoder,
    PipelineConfig,
    RidgeModel,
    cross_validate,
    encode_level,
    encode_sample,
    grid_search,
    ingest_dataset,
    predict,
    quantize,
    ridge_train,
)
