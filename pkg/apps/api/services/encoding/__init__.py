from .encoders import (
    combination_index,
    combination_options,
    decode_one_hot,
    encode,
    encode_feature,
    encode_fcc,
    encode_feature_count,
    encode_many,
    encode_one_hot,
    encode_statistical,
)
from .schemes import (
    SCHEMES,
    EncodedVector,
    EncodingError,
    SchemeKind,
    encoding_length,
    parse_scheme,
    unit_length,
)

__all__ = [
    "EncodedVector",
    "EncodingError",
    "SCHEMES",
    "SchemeKind",
    "combination_index",
    "combination_options",
    "decode_one_hot",
    "encode",
    "encode_fcc",
    "encode_feature",
    "encode_feature_count",
    "encode_many",
    "encode_one_hot",
    "encode_statistical",
    "encoding_length",
    "parse_scheme",
    "unit_length",
]
