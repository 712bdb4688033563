import numpy as np
import pytest

import subcluster as sc


def test_padding_and_io(tmp_path):
    g = sc.Graph(3, 3, [[1, 2], [0, 2], [0, 1]])
    assert g.neighbor(0, 2) == 0
    path = str(tmp_path / "g.txt")
    sc.save_graph(g, path)
    assert sc.load_graph(path) == g


def test_bad_adjacency_raises():
    with pytest.raises(sc.ParseError):
        sc.Graph(2, 1, [[1], []])


def test_polynomial_coefficient():
    assert sc.cheb_coefficient(1, 0.1, 3) == pytest.approx(0.307633246177, abs=1e-11)
    wp = sc.walk_polynomial(400, 0.6, 0.001, t_min=20, degree=0)
    assert wp.eval(1.0) == pytest.approx(wp.coeffs[0])


def test_clique_pipeline():
    g, labels = sc.disjoint_cliques(4, 25)
    evals, U = sc.spectral_embedding(g, labels, 4)
    assert np.allclose(evals[:4], 0, atol=1e-9)
    oracle = sc.preprocess(g, k_hat=4, phi=0.5, eps=1e-3, seed=3, t_min=4, degree=0, max_leaves=20)
    pred = oracle.query_many(g, list(range(g.n)))
    errors, rate, unclassified = sc.misclassification(labels, 4, pred)
    covered = {labels[r] for r in oracle.representatives}
    assert errors == 25 * (4 - len(covered))
    again = sc.oracle_from_bytes(oracle.to_bytes())
    assert again.query_many(g, list(range(g.n))) == pred


def test_wrong_graph_rejected():
    g, _ = sc.disjoint_cliques(2, 10)
    h, _ = sc.disjoint_cliques(2, 11)
    oracle = sc.preprocess(g, k_hat=2, phi=0.5, eps=1e-3, t_min=4, degree=0)
    with pytest.raises(sc.WrongGraphError):
        oracle.query(h, 0)


def test_misclassification_moved_vertex():
    truth = [0, 0, 0, 1, 1, 1]
    assert sc.misclassification(truth, 2, [1, 1, 1, 0, 0, 0])[0] == 0
    assert sc.misclassification(truth, 2, [0, 0, 1, 1, 1, 1])[0] == 2
