# python/ldadnn/__init__.py


# Copyright 2026  The ldadnn Authors

# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#  http://www.apache.org/licenses/LICENSE-2.0
#
# THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
# KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
# WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
# MERCHANTABLITY OR NON-INFRINGEMENT.
# See the Apache 2 License for the specific language governing permissions and
# limitations under the License.


"""Latent-domain discovery (GMM, LDA) and domain-aware network training."""

from ._core import (
    DomainAssignment,
    FilterResult,
    FrameDataset,
    GmmModel,
    LdaModel,
    LdatNetwork,
    assign,
    average_domain_entropy,
    cross_agreement_filter,
    fit_lda,
    frame_accuracy,
    make_assignment,
    random_topics,
    synthetic_lda_counts,
    train_gmm,
    train_network,
    ubic,
)

__all__ = [
    "DomainAssignment",
    "FilterResult",
    "FrameDataset",
    "GmmModel",
    "LdaModel",
    "LdatNetwork",
    "assign",
    "average_domain_entropy",
    "cross_agreement_filter",
    "fit_lda",
    "frame_accuracy",
    "make_assignment",
    "random_topics",
    "synthetic_lda_counts",
    "train_gmm",
    "train_network",
    "ubic",
]
