"""Observation encoders: shared-MLP/max-pool cloud encoder, raw flatten,
and a small CNN for occupancy images.

Encoders map an observation batch to a feature matrix [B, F]. Policy and
critic heads consume the features; during updates the encoder receives the
accumulated feature gradients from every head exactly once.
"""

import numpy as np

from .layers import MLP, elu, elu_grad


class PointNetEncoder:
    """Per-point MLP followed by coordinate-wise max pooling.

    The pooled feature is exactly permutation- and duplication-invariant;
    on ties the lowest point index receives the gradient.
    """

    consumes = "cloud"

    def __init__(self, builder, point_dim, hidden, feat_dim, prefix="pointnet"):
        self.point_dim = point_dim
        self.feat_dim = feat_dim
        self.point_mlp = MLP(builder, prefix + ".u", point_dim,
                             list(hidden), feat_dim)

    def bind(self, store):
        self.point_mlp.bind(store)
        return self

    def forward(self, batch):
        cloud = np.asarray(batch["cloud"], dtype=np.float64)
        b, n, pf = cloud.shape
        if pf != self.point_dim:
            raise ValueError(f"point feature width {pf} != {self.point_dim}")
        flat, mlp_cache = self.point_mlp.forward(cloud.reshape(b * n, pf))
        feats = flat.reshape(b, n, self.feat_dim)
        argmax = feats.argmax(axis=1)  # first index wins ties
        pooled = np.take_along_axis(feats, argmax[:, None, :], axis=1)[:, 0, :]
        return pooled, (mlp_cache, argmax, (b, n))

    def backward(self, cache, dpooled, accumulate=True):
        mlp_cache, argmax, (b, n) = cache
        dfeats = np.zeros((b, n, self.feat_dim))
        np.put_along_axis(dfeats, argmax[:, None, :], dpooled[:, None, :], axis=1)
        self.point_mlp.backward(mlp_cache, dfeats.reshape(b * n, self.feat_dim),
                                accumulate=accumulate)


class FlattenEncoder:
    """Raw flattened cloud; the parameter-free front of the plain-MLP
    baseline."""

    consumes = "cloud"

    def __init__(self, n_points, point_dim):
        self.feat_dim = n_points * point_dim

    def bind(self, store):
        return self

    def forward(self, batch):
        cloud = np.asarray(batch["cloud"], dtype=np.float64)
        b = cloud.shape[0]
        return cloud.reshape(b, -1), None

    def backward(self, cache, dpooled, accumulate=True):
        pass


def _im2col_indices(h, w, k=3):
    # zero-padded 3x3 neighborhoods; index map into the padded image
    ii = np.arange(h)[:, None, None, None]
    jj = np.arange(w)[None, :, None, None]
    ki = np.arange(k)[None, None, :, None]
    kj = np.arange(k)[None, None, None, :]
    rows = np.broadcast_to(ii + ki, (h, w, k, k)).reshape(h * w, k, k)
    cols = np.broadcast_to(jj + kj, (h, w, k, k)).reshape(h * w, k, k)
    return rows, cols


class CNNEncoder:
    """Three 3x3 conv layers (stride 1, zero pad, ELU), each followed by a
    2x2 max pool; output is the flattened final feature map."""

    consumes = "image"

    def __init__(self, builder, resolution, channels=32, n_layers=3,
                 prefix="cnn"):
        if resolution % (2 ** n_layers) != 0:
            raise ValueError("resolution must be divisible by 2^n_layers")
        self.resolution = resolution
        self.channels = channels
        self.n_layers = n_layers
        self.prefix = prefix
        self.store = None
        ch_in = 1
        if hasattr(builder, "linear"):
            for i in range(n_layers):
                builder.linear(f"{prefix}.c{i}", ch_in * 9, channels)
                ch_in = channels
        side = resolution // (2 ** n_layers)
        self.feat_dim = side * side * channels

    def bind(self, store):
        self.store = store
        return self

    def _conv_forward(self, x, i):
        # x: [B, C, H, W] -> [B, channels, H, W]
        b, c, h, w = x.shape
        pad = np.zeros((b, c, h + 2, w + 2))
        pad[:, :, 1:-1, 1:-1] = x
        rows, cols = _im2col_indices(h, w)
        patches = pad[:, :, rows, cols]              # [B, C, H*W, 3, 3]
        patches = patches.transpose(0, 2, 1, 3, 4).reshape(b, h * w, c * 9)
        wgt = self.store.view(f"{self.prefix}.c{i}.w")
        bias = self.store.view(f"{self.prefix}.c{i}.b")
        out = patches @ wgt + bias                    # [B, H*W, channels]
        out = out.transpose(0, 2, 1).reshape(b, self.channels, h, w)
        return out, patches

    def _conv_backward(self, dout, patches, x_shape, i, accumulate):
        b, c, h, w = x_shape
        dflat = dout.reshape(b, self.channels, h * w).transpose(0, 2, 1)
        wgt = self.store.view(f"{self.prefix}.c{i}.w")
        if accumulate:
            gw = np.einsum("bpk,bpo->ko", patches, dflat)
            self.store.grad_view(f"{self.prefix}.c{i}.w")[:] += gw
            self.store.grad_view(f"{self.prefix}.c{i}.b")[:] += dflat.sum(axis=(0, 1))
        dpatches = dflat @ wgt.T                      # [B, H*W, C*9]
        dpatches = dpatches.reshape(b, h * w, c, 9).transpose(0, 2, 1, 3)
        dpad = np.zeros((b, c, h + 2, w + 2))
        rows, cols = _im2col_indices(h, w)
        np.add.at(dpad, (slice(None), slice(None), rows.reshape(h * w, 3, 3),
                         cols.reshape(h * w, 3, 3)),
                  dpatches.reshape(b, c, h * w, 3, 3))
        return dpad[:, :, 1:-1, 1:-1]

    def forward(self, batch):
        img = np.asarray(batch["image"], dtype=np.float64)
        if img.ndim == 2:
            img = img[None, :, :]
        b = img.shape[0]
        if img.shape[1] != self.resolution:
            raise ValueError(
                f"image resolution {img.shape[1]} != {self.resolution}")
        x = img[:, None, :, :]
        caches = []
        for i in range(self.n_layers):
            conv, patches = self._conv_forward(x, i)
            act = elu(conv)
            bb, cc, hh, ww = act.shape
            blocks = act.reshape(bb, cc, hh // 2, 2, ww // 2, 2)
            pooled = blocks.max(axis=(3, 5))
            mask = blocks == pooled[:, :, :, None, :, None]
            caches.append((x.shape, patches, conv, mask))
            x = pooled
        return x.reshape(b, -1), caches

    def backward(self, cache, dfeat, accumulate=True):
        caches = cache
        b = dfeat.shape[0]
        side = self.resolution // (2 ** self.n_layers)
        d = dfeat.reshape(b, self.channels, side, side)
        for i in reversed(range(self.n_layers)):
            x_shape, patches, conv, mask = caches[i]
            bb, cc, hh, ww = conv.shape
            dblocks = mask * d[:, :, :, None, :, None]
            # ties distribute; normalize so the total gradient is preserved
            counts = mask.sum(axis=(3, 5), keepdims=True)
            dblocks = dblocks / counts
            dact = dblocks.reshape(bb, cc, hh, ww)
            dconv = dact * elu_grad(conv)
            d = self._conv_backward(dconv, patches, x_shape, i, accumulate)
        return d[:, 0, :, :]
