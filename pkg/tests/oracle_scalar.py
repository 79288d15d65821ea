"""Brute-force classical frame computations on plain vectors.

Deliberately naive: frame operators as explicit sums of outer products,
coefficients as individual inner products, duals through a dense solve per
vector.  Used as the independent cross-check for families with 1x1
coefficient blocks.
"""

import math

import numpy as np


class ScalarFrameOracle:
    def __init__(self, vectors):
        self.vectors = [np.asarray(v, dtype=complex) for v in vectors]
        self.dim = self.vectors[0].size

    def frame_operator(self):
        s = np.zeros((self.dim, self.dim), dtype=complex)
        for v in self.vectors:
            s += np.outer(v, v.conj())
        return s

    def bounds(self):
        w = np.linalg.eigvalsh(self.frame_operator())
        return float(w[0]), float(w[-1])

    def coefficients(self, f):
        return np.array([np.vdot(v, f) for v in self.vectors])

    def resynthesize(self, coeffs):
        out = np.zeros(self.dim, dtype=complex)
        for c, v in zip(coeffs, self.vectors):
            out += c * v
        return out

    def dual_vectors(self):
        s = self.frame_operator()
        return [np.linalg.solve(s, v) for v in self.vectors]

    def reconstruct(self, f):
        out = np.zeros(self.dim, dtype=complex)
        for v, dual in zip(self.vectors, self.dual_vectors()):
            out += np.vdot(dual, f) * v
        return out

    def deviation(self, other):
        """Smallest M with sum_j |<f, v_j - w_j>|^2 <= M |f|^2."""
        d = np.zeros((self.dim, self.dim), dtype=complex)
        for v, w in zip(self.vectors, other.vectors):
            diff = v - w
            d += np.outer(diff, diff.conj())
        return float(np.linalg.eigvalsh(d)[-1])

    @staticmethod
    def predicted_bounds(a, b, lambda1, lambda2, mu):
        shrink = 1.0 - (lambda1 + lambda2 + mu / math.sqrt(a)) / (1.0 + lambda2)
        grow = 1.0 + (lambda1 + lambda2 + mu / math.sqrt(b)) / (1.0 - lambda2)
        return a * shrink**2, b * grow**2
