# python/tests/test_smoke.py


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


import json

import numpy as np
import pytest

import ldadnn


def test_gmm_quantizes_separated_clusters():
    rng = np.random.default_rng(0)
    centers = np.array([[0.0, 0.0], [10.0, 0.0], [0.0, 10.0]])
    frames = np.vstack([c + rng.normal(size=(200, 2)) for c in centers])
    gmm = ldadnn.train_gmm(frames, 3)
    symbols = np.array(gmm.quantize(frames))
    for block in np.split(symbols, 3):
        assert len(set(block)) == 1
    assert len(set(symbols)) == 3
    r = gmm.responsibilities(frames[0])
    assert r.sum() == pytest.approx(1.0)
    again = ldadnn.GmmModel.from_json(gmm.to_json())
    np.testing.assert_array_equal(again.means, gmm.means)


def test_lda_assign_filter_entropy():
    beta = ldadnn.random_topics(3, 20, 0.1, 5)
    counts = ldadnn.synthetic_lda_counts(0.1, beta, 60, 80, 6)
    assert counts.shape == (60, 20)
    model = ldadnn.fit_lda(counts, 3, seed=1)
    assert model.beta.shape == (3, 20)
    np.testing.assert_allclose(model.beta.sum(axis=1), 1.0, atol=1e-9)
    assignments = ldadnn.assign(model, counts)
    assert len(assignments) == 60
    a = assignments[0]
    assert a.map_domain == int(np.argmax(a.theta))
    assert a.ubic == ldadnn.ubic(a.map_domain, 3)
    h = ldadnn.average_domain_entropy(assignments)
    assert 0.0 <= h <= np.log2(3)
    result = ldadnn.cross_agreement_filter(assignments, assignments, 0.5 * 60 * 80)
    assert result.num_tuples == 9
    assert result.kept_weight >= 0.5 * 60 * 80
    again = ldadnn.LdaModel.from_json(model.to_json())
    np.testing.assert_array_equal(again.beta, model.beta)
    assert json.loads(model.to_json())["K"] == 3
    assert model.alpha == [1.0 / 3] * 3


def test_augmented_network_matches_baseline():
    base = ldadnn.LdatNetwork(4, 3, hidden=[5], seed=2)
    aug = base.augment(2, seed=3)
    x = np.array([0.3, -1.0, 2.0, 0.5])
    np.testing.assert_allclose(aug.forward(x, [0.0, 1.0]), base.forward(x), atol=1e-12)
    assert np.all(aug.domain_weights == 0.0)
    assert aug.gradient_check(x, [1.0, 0.0], 1) < 1e-4


def test_training_learns_a_domain_shift():
    rng = np.random.default_rng(1)
    domains = rng.integers(0, 2, size=800)
    labels = rng.integers(0, 2, size=800)
    frames = (labels * 2.0 - 1.0)[:, None] + (domains * 4.0 - 2.0)[:, None]
    frames = frames + 0.3 * rng.normal(size=(800, 1))
    data = ldadnn.FrameDataset(frames, labels.tolist(), domains.tolist(), 2)
    net = ldadnn.LdatNetwork(1, 2, hidden=[8], domain_dim=2, seed=4)
    trained = ldadnn.train_network(net, data, lr=0.5, epochs=30, seed=5)
    assert ldadnn.frame_accuracy(trained, data) > 0.95


def test_errors_become_value_error():
    with pytest.raises(ValueError):
        ldadnn.ubic(3, 2)
    with pytest.raises(ValueError):
        ldadnn.make_assignment("d", [0.5, 0.6], 1.0)
