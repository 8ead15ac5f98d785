"""tenalg: dense tensors, the truncated tensor algebra, path signatures,
order-2 rank decomposition and minimal factoring of tensor-product
expressions, over exact rational / real / complex scalars."""

__version__ = "0.1.0"

from .algebra import (
    NotInvertibleError,
    TruncatedTensor,
    basis_word,
    concat_product,
    inverse,
    project,
    truncated_dim,
    unit,
    word_to_index,
)
from .dense import (
    DenseTensor,
    ShapeMismatchError,
    add,
    basis_vector,
    multi_tensor_product,
    scale,
    tensor_product,
)
from .expr import (
    ExprSyntaxError,
    TensorExpr,
    expand,
    factor_exact_order2,
    factor_greedy,
    factor_heuristic_higher_order,
    parse,
    render,
    to_coefficient_tensor,
)
from .rank import (
    ConvergenceError,
    RankDecomposition,
    rank_decompose_rref,
    rank_decompose_svd,
    rref,
    svd,
    verify_decomposition,
)
from .scalars import COMPLEX, EPS_F, RATIONAL, REAL, FieldMismatchError
from .signature import (
    PiecewiseLinearPath,
    Signature,
    oracle_signature,
    path_signature,
    segment_signature,
)

__all__ = [
    "__version__",
    "COMPLEX",
    "ConvergenceError",
    "DenseTensor",
    "EPS_F",
    "ExprSyntaxError",
    "FieldMismatchError",
    "NotInvertibleError",
    "PiecewiseLinearPath",
    "RankDecomposition",
    "RATIONAL",
    "REAL",
    "ShapeMismatchError",
    "Signature",
    "TensorExpr",
    "TruncatedTensor",
    "add",
    "basis_vector",
    "basis_word",
    "concat_product",
    "expand",
    "factor_exact_order2",
    "factor_greedy",
    "factor_heuristic_higher_order",
    "inverse",
    "multi_tensor_product",
    "oracle_signature",
    "parse",
    "path_signature",
    "project",
    "rank_decompose_rref",
    "rank_decompose_svd",
    "render",
    "rref",
    "scale",
    "segment_signature",
    "svd",
    "tensor_product",
    "to_coefficient_tensor",
    "truncated_dim",
    "unit",
    "verify_decomposition",
    "word_to_index",
]
