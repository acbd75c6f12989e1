"""Secure transformation protocols as party programs over the runtime."""
from .common import (PartyResult, PartyShare, ProtocolConfig, ProtocolRun, TransformedProblem,
                     homomorphic_apply_vec, homomorphic_right_mul, homomorphic_vec_mat, mask_bound,
                     net_mask_offsets, sample_mask)
from .multi_party import MIN_PARTIES, mask_offsets, multi_party_transform, published_sum
from .reconstruct import reconstruct, solve_and_reconstruct, solve_transformed
from .two_party import (secure_scalar_product, two_party_transform_arbitrary,
                        two_party_transform_split)

__all__ = [
    "PartyResult", "PartyShare", "ProtocolConfig", "ProtocolRun", "TransformedProblem",
    "homomorphic_apply_vec", "homomorphic_right_mul", "homomorphic_vec_mat", "mask_bound",
    "net_mask_offsets", "sample_mask", "MIN_PARTIES", "mask_offsets", "multi_party_transform",
    "published_sum", "reconstruct", "solve_and_reconstruct", "solve_transformed",
    "secure_scalar_product", "two_party_transform_arbitrary", "two_party_transform_split",
]
