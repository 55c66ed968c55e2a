"""Dense layers with explicit forward caches.

forward() returns (output, cache); backward(cache, upstream) accumulates
parameter gradients into the store (unless told not to) and returns the
input gradient. Caches make multi-pass graphs (several forwards before any
backward) safe.
"""

import numpy as np


def elu(x):
    # arithmetic blend; np.exp takes numpy's SIMD path where np.where /
    # masked expm1 fall into scalar-libm territory and cost 10x more
    neg = x < 0.0
    e = np.exp(x * neg)  # non-negative lanes see exp(0) = 1
    return x * ~neg + (e - 1.0) * neg


def elu_grad(pre):
    neg = pre < 0.0
    return ~neg + np.exp(pre * neg) * neg


def elu_grad_from_output(pre, post):
    """ELU derivative recovered from cached activations (exp-free)."""
    neg = pre < 0.0
    return ~neg + (post + 1.0) * neg


class MLP:
    """Affine stack with ELU activations on hidden layers, linear output."""

    def __init__(self, builder_or_store, prefix, in_dim, hidden, out_dim,
                 final_scale=1.0):
        self.prefix = prefix
        self.dims = [in_dim] + list(hidden) + [out_dim]
        self.n_layers = len(self.dims) - 1
        self.store = None
        builder = builder_or_store
        if hasattr(builder, "linear"):  # ParamBuilder: register parameters
            for i in range(self.n_layers):
                scale = final_scale if i == self.n_layers - 1 else 1.0
                builder.linear(self._lname(i), self.dims[i], self.dims[i + 1],
                               scale=scale)
        else:
            self.store = builder

    def _lname(self, i):
        return f"{self.prefix}.l{i}"

    def bind(self, store):
        self.store = store
        return self

    @property
    def in_dim(self):
        return self.dims[0]

    @property
    def out_dim(self):
        return self.dims[-1]

    def forward(self, x):
        x = np.asarray(x, dtype=np.float64)
        if x.ndim == 1:
            x = x[None, :]
        if x.shape[1] != self.dims[0]:
            raise ValueError(
                f"{self.prefix}: input width {x.shape[1]} != {self.dims[0]}")
        pres = []
        hs = [x]
        h = x
        for i in range(self.n_layers):
            w = self.store.view(self._lname(i) + ".w")
            b = self.store.view(self._lname(i) + ".b")
            pre = h @ w + b
            if i < self.n_layers - 1:
                h = elu(pre)
                pres.append(pre)
            else:
                h = pre
            hs.append(h)
        return h, (hs, pres)

    def backward(self, cache, dy, accumulate=True):
        hs, pres = cache
        dy = np.asarray(dy, dtype=np.float64)
        if dy.ndim == 1:
            dy = dy[None, :]
        d = dy
        for i in reversed(range(self.n_layers)):
            if i < self.n_layers - 1:
                d = d * elu_grad_from_output(pres[i], hs[i + 1])
            w = self.store.view(self._lname(i) + ".w")
            if accumulate:
                self.store.grad_view(self._lname(i) + ".w")[:] += hs[i].T @ d
                self.store.grad_view(self._lname(i) + ".b")[:] += d.sum(axis=0)
            d = d @ w.T
        return d
