"""Flat parameter stores with paired gradients and Adam state.

A ParamStore owns one float64 vector for parameters, one for gradients,
and the two Adam moment vectors; layers hold named views into it. This
keeps optimizer steps, finite-difference checks, and checkpointing
trivially whole-network operations.
"""

import json
import struct

import numpy as np

CHECKPOINT_MAGIC = b"PPLNCKPT"
CHECKPOINT_VERSION = 1


class ParamStore:
    def __init__(self, names, shapes, data):
        self.names = list(names)
        self.shapes = [tuple(s) for s in shapes]
        sizes = [int(np.prod(s)) for s in self.shapes]
        self.offsets = np.concatenate([[0], np.cumsum(sizes)]).astype(int)
        self.data = np.ascontiguousarray(data, dtype=np.float64)
        if self.data.size != self.offsets[-1]:
            raise ValueError("parameter data does not match the declared shapes")
        self.grad = np.zeros_like(self.data)
        self.adam_m = np.zeros_like(self.data)
        self.adam_v = np.zeros_like(self.data)
        self.adam_step_count = 0
        self._index = {n: i for i, n in enumerate(self.names)}

    @property
    def size(self):
        return self.data.size

    def _slice(self, name):
        i = self._index[name]
        return slice(self.offsets[i], self.offsets[i + 1]), self.shapes[i]

    def view(self, name):
        sl, shape = self._slice(name)
        return self.data[sl].reshape(shape)

    def grad_view(self, name):
        sl, shape = self._slice(name)
        return self.grad[sl].reshape(shape)

    def zero_grad(self):
        self.grad[:] = 0.0

    def adam_update(self, lr, beta1=0.9, beta2=0.999, eps=1e-8):
        """Bias-corrected Adam step on all parameters; zeroes gradients."""
        if not np.all(np.isfinite(self.grad)):
            raise FloatingPointError("non-finite gradient in Adam step")
        self.adam_step_count += 1
        t = self.adam_step_count
        g = self.grad
        self.adam_m *= beta1
        self.adam_m += (1.0 - beta1) * g
        self.adam_v *= beta2
        self.adam_v += (1.0 - beta2) * g * g
        m_hat = self.adam_m / (1.0 - beta1 ** t)
        v_hat = self.adam_v / (1.0 - beta2 ** t)
        self.data -= lr * m_hat / (np.sqrt(v_hat) + eps)
        self.zero_grad()

    def clone(self):
        out = ParamStore(self.names, self.shapes, self.data.copy())
        out.adam_m = self.adam_m.copy()
        out.adam_v = self.adam_v.copy()
        out.adam_step_count = self.adam_step_count
        return out

    def copy_from(self, other):
        self.data[:] = other.data

    def polyak_from(self, other, tau):
        """data <- tau * other + (1 - tau) * data (target-network update)."""
        self.data *= 1.0 - tau
        self.data += tau * other.data


class ParamBuilder:
    """Collects named initialized arrays, then freezes them into a store."""

    def __init__(self, rng):
        self.rng = rng
        self.items = []

    def add(self, name, array):
        self.items.append((name, np.asarray(array, dtype=np.float64)))

    def linear(self, name, fan_in, fan_out, scale=1.0):
        """Affine layer parameters with uniform fan-in initialization."""
        bound = scale / np.sqrt(max(fan_in, 1))
        self.add(name + ".w", self.rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        self.add(name + ".b", self.rng.uniform(-bound, bound, size=fan_out))

    def scalar(self, name, value):
        self.add(name, np.array([float(value)]))

    def build(self):
        names = [n for n, _ in self.items]
        if len(set(names)) != len(names):
            raise ValueError("duplicate parameter names")
        shapes = [a.shape for _, a in self.items]
        flat = (np.concatenate([a.ravel() for _, a in self.items])
                if self.items else np.zeros(0))
        return ParamStore(names, shapes, flat)


# ------------------------------------------------------------- checkpointing

def _write_blob(fh, name, array):
    enc = name.encode("utf-8")
    fh.write(struct.pack("<H", len(enc)))
    fh.write(enc)
    fh.write(struct.pack("<Q", array.size))
    fh.write(np.ascontiguousarray(array, dtype="<f8").tobytes())


def _read_blob(fh):
    (name_len,) = struct.unpack("<H", fh.read(2))
    name = fh.read(name_len).decode("utf-8")
    (count,) = struct.unpack("<Q", fh.read(8))
    data = np.frombuffer(fh.read(8 * count), dtype="<f8").astype(np.float64)
    return name, data


def save_checkpoint(path, stores, config=None):
    """Write stores to `<path>` (binary) and `<path>.json` (sidecar).

    Binary layout: 8-byte magic, u32 version, u32 blob count, then blobs of
    (u16 name length, name, u64 double count, little-endian float64 data).
    The sidecar carries layer metadata and the architecture config; the
    round trip is bit-exact.
    """
    path = str(path)
    meta = {"version": CHECKPOINT_VERSION, "config": config or {}, "stores": {}}
    blobs = []
    for sname, store in stores.items():
        meta["stores"][sname] = {
            "adam_step": store.adam_step_count,
            "params": [{"name": n, "shape": list(s)}
                       for n, s in zip(store.names, store.shapes)],
        }
        blobs.append((f"{sname}/data", store.data))
        blobs.append((f"{sname}/adam_m", store.adam_m))
        blobs.append((f"{sname}/adam_v", store.adam_v))
    with open(path, "wb") as fh:
        fh.write(CHECKPOINT_MAGIC)
        fh.write(struct.pack("<II", CHECKPOINT_VERSION, len(blobs)))
        for name, arr in blobs:
            _write_blob(fh, name, arr)
    with open(path + ".json", "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)


def load_checkpoint(path):
    """Returns (stores: dict[str, ParamStore], config: dict)."""
    path = str(path)
    with open(path + ".json") as fh:
        meta = json.load(fh)
    if meta["version"] != CHECKPOINT_VERSION:
        raise ValueError(f"unsupported checkpoint version {meta['version']}")
    with open(path, "rb") as fh:
        if fh.read(8) != CHECKPOINT_MAGIC:
            raise ValueError("not a parameter checkpoint")
        version, n_blobs = struct.unpack("<II", fh.read(8))
        blobs = dict(_read_blob(fh) for _ in range(n_blobs))
    stores = {}
    for sname, info in meta["stores"].items():
        names = [p["name"] for p in info["params"]]
        shapes = [tuple(p["shape"]) for p in info["params"]]
        store = ParamStore(names, shapes, blobs[f"{sname}/data"])
        store.adam_m[:] = blobs[f"{sname}/adam_m"]
        store.adam_v[:] = blobs[f"{sname}/adam_v"]
        store.adam_step_count = int(info["adam_step"])
        stores[sname] = store
    return stores, meta["config"]
