"""Reference k-reciprocal re-ranking (numpy), used to freeze the small-case fixture in
tests/test_eval.cpp. Run: python3 tests/oracles/rerank_reference.py"""
import numpy as np


def re_ranking(q_g_dist, q_q_dist, g_g_dist, k1, k2, lambda_value):
    original_dist = np.concatenate(
        [np.concatenate([q_q_dist, q_g_dist], axis=1),
         np.concatenate([q_g_dist.T, g_g_dist], axis=1)], axis=0)
    original_dist = np.power(original_dist, 2)
    original_dist = np.transpose(1.0 * original_dist / np.max(original_dist, axis=0))
    V = np.zeros_like(original_dist)
    initial_rank = np.argsort(original_dist, kind="stable")
    query_num = q_g_dist.shape[0]
    all_num = original_dist.shape[0]
    for i in range(all_num):
        forward = initial_rank[i, :k1 + 1]
        backward = initial_rank[forward, :k1 + 1]
        fi = np.where(backward == i)[0]
        k_reciprocal_index = forward[fi]
        expansion = k_reciprocal_index
        for candidate in k_reciprocal_index:
            half = int(np.around(k1 / 2.0))
            c_forward = initial_rank[candidate, :half + 1]
            c_backward = initial_rank[c_forward, :half + 1]
            c_fi = np.where(c_backward == candidate)[0]
            c_recip = c_forward[c_fi]
            if len(np.intersect1d(c_recip, k_reciprocal_index)) > 2.0 / 3 * len(c_recip):
                expansion = np.append(expansion, c_recip)
        expansion = np.unique(expansion)
        weight = np.exp(-original_dist[i, expansion])
        V[i, expansion] = weight / np.sum(weight)
    original_dist = original_dist[:query_num, ]
    if k2 != 1:
        V_qe = np.zeros_like(V)
        for i in range(all_num):
            V_qe[i, :] = np.mean(V[initial_rank[i, :k2], :], axis=0)
        V = V_qe
    jaccard = np.zeros_like(original_dist)
    for i in range(query_num):
        temp_min = np.zeros(all_num)
        for j in np.where(V[i, :] != 0)[0]:
            rows = np.where(V[:, j] != 0)[0]
            temp_min[rows] += np.minimum(V[i, j], V[rows, j])
        jaccard[i] = 1 - temp_min / (2.0 - temp_min)
    final = jaccard * (1 - lambda_value) + original_dist * lambda_value
    return final[:query_num, query_num:]


def fixture():
    q = np.array([[0.0, 0.0], [1.0, 0.2]])
    g = np.array([[0.1, 0.0], [0.9, 0.3], [0.5, 1.0]])
    d = lambda a, b: np.sqrt(((a[:, None, :] - b[None, :, :]) ** 2).sum(-1))
    return d(q, g), d(q, q), d(g, g)


if __name__ == "__main__":
    np.set_printoptions(precision=17)
    qg, qq, gg = fixture()
    for k1, k2, lam in [(2, 1, 0.3), (3, 2, 0.3), (4, 2, 0.0)]:
        out = re_ranking(qg, qq, gg, k1, k2, lam)
        print(f"k1={k1} k2={k2} lambda={lam}")
        for row in out:
            print("  {" + ", ".join(repr(float(v)) for v in row) + "},")
