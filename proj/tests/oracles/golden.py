"""Independent reference computations for the frozen values in the C++ tests.

Run with `python3 tests/oracles/golden.py`; it prints every value that the
unit tests pin. Nothing here imports the C++ code.
"""

import itertools
import math
import struct

import numpy as np

MASK = (1 << 64) - 1


class SplitMix64:
    def __init__(self, seed):
        self.state = seed & MASK

    def next_u64(self):
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
        return z ^ (z >> 31)

    def uniform(self, lo=0.0, hi=1.0):
        u = (self.next_u64() >> 11) * 2.0**-53
        return lo + (hi - lo) * u

    def gaussian(self):
        u1 = self.uniform()
        u2 = self.uniform()
        return math.sqrt(-2.0 * math.log(1.0 - u1)) * math.cos(2.0 * math.pi * u2)

    def below(self, n):
        return min(int(self.uniform() * n), n - 1)


def derive_seed(base, index):
    return SplitMix64(base ^ ((0xD1B54A32D192ED03 * (index + 1)) & MASK)).next_u64()


def f32(x):
    return struct.unpack("<f", struct.pack("<f", x))[0]


def show(name, values):
    if isinstance(values, (list, tuple, np.ndarray)):
        items = [v if isinstance(v, str) else repr(float(v)) for v in np.ravel(np.asarray(values, dtype=object))]
        print(f"{name} = {{" + ", ".join(items) + "}")
    else:
        print(f"{name} = {values!r}")


# ---------------------------------------------------------------- stream
def stream_values():
    r = SplitMix64(0)
    show("splitmix seed 0 first outputs", [hex(r.next_u64()) for _ in range(3)])
    show("derive_seed(5, 2)", hex(derive_seed(5, 2)))


# ---------------------------------------------------------------- augment
def augment_values():
    r = SplitMix64(42)
    show("scale factors seed 42 [0.8,1.2]", [r.uniform(0.8, 1.2) for _ in range(3)])

    r = SplitMix64(7)
    pts = [(0.0, 0.0, 0.0), (1.0, 2.0, 3.0)]
    out = []
    for p in pts:
        out.append([c + min(max(0.01 * r.gaussian(), -0.05), 0.05) for c in p])
    show("jitter seed 7 sigma 0.01 clip 0.05", out)

    r = SplitMix64(3)
    n, count = 8, int(math.floor(0.25 * 8))
    perm = list(range(n))
    chosen = []
    for i in range(count):
        j = i + r.below(n - i)
        perm[i], perm[j] = perm[j], perm[i]
        chosen.append(perm[i])
    show("zero_mask seed 3 n 8 fraction 0.25 indices", chosen)

    r = SplitMix64(1)
    pts = [(1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0), (1.0, 1.0, 1.0)]
    s = [r.uniform(0.8, 1.2) for _ in range(3)]
    scaled = [[p[a] * s[a] for a in range(3)] for p in pts]
    jittered = [[c + min(max(0.01 * r.gaussian(), -0.05), 0.05) for c in p] for p in scaled]
    # floor(0.05 * 4) = 0 points are zeroed.
    show("s3da seed 1 default config", jittered)


# ---------------------------------------------------------------- weights
def init_values():
    stage1 = [3, 64, 128, 256, 512]
    r = SplitMix64(0)
    first = None
    for cin, cout in zip(stage1, stage1[1:]):
        mid = cout // 2
        for k, i, o in ((3, cin, mid), (5, cin, mid), (1, 2 * mid, cout)):
            s = math.sqrt(6.0 / (k * i + k * o))
            for _ in range(k * i * o):
                v = f32(r.uniform(-s, s))
                if first is None:
                    first = v
    s = math.sqrt(6.0 / (512 + 256))
    mlp0_first = f32(r.uniform(-s, s))
    show("init_weights(0) s1.ccb0.conv3.w[0]", first)
    show("init_weights(0) mlp.0.w[0]", mlp0_first)


# ---------------------------------------------------------------- network
def conv1d(x, w, b):
    k = w.shape[0]
    half = k // 2
    n = x.shape[0]
    y = np.tile(b, (n, 1)).astype(np.float64)
    for i in range(n):
        for tap in range(k):
            src = i + tap - half
            if 0 <= src < n:
                y[i] += x[src] @ w[tap]
    return y


def elu(x):
    return np.where(x > 0, x, np.expm1(np.minimum(x, 0)))


def pattern(shape, a, b):
    # Deterministic weights shared with the C++ tests: sin(a * i + b) / 2.
    size = int(np.prod(shape))
    return (np.sin(a * np.arange(size) + b) / 2).reshape(shape)


def network_values():
    x = np.array([[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]])
    w = ((np.arange(12) + 1) / 10.0).reshape(3, 2, 2)
    b = np.array([0.5, -0.5])
    show("conv1d 3-row k3 output", conv1d(x, w, b))

    x = np.array([[0.1, -0.2, 0.3], [0.4, 0.5, -0.6]])
    w3 = pattern((3, 3, 2), 0.7, 0.1)
    w5 = pattern((5, 3, 2), 1.3, 0.2)
    wf = pattern((1, 4, 4), 0.9, 0.3)
    b3 = np.array([0.05, -0.05])
    b5 = np.array([0.0, 0.1])
    bf = np.array([0.1, -0.1, 0.2, -0.2])
    gamma = np.array([1.5, 0.5, 1.0, 2.0])
    beta = np.array([0.1, 0.0, -0.1, 0.2])
    mean = np.array([0.0, 0.1, -0.1, 0.2])
    var = np.array([1.0, 0.5, 2.0, 0.25])
    cat = np.concatenate([conv1d(x, w3, b3), conv1d(x, w5, b5)], axis=1)
    y = elu(conv1d(cat, wf, bf))
    y = gamma * (y - mean) / np.sqrt(var + 1e-5) + beta
    show("ccb 2-point output", y)

    v = np.sin(np.arange(512) * 0.05) * 0.5
    w0 = pattern((512, 256), 0.011, 0.0) * 0.1
    b0 = np.cos(np.arange(256) * 0.3) * 0.05
    w1 = pattern((256, 9), 0.017, 0.5) * 0.1
    b1 = np.linspace(-0.1, 0.1, 9)
    hidden = elu(v @ w0 + b0)
    m = (hidden @ w1 + b1).reshape(3, 3) + np.eye(3)
    show("transform matrix M", m)


# ---------------------------------------------------------------- metrics
def auroc_pairs(scores, labels):
    pos = [s for s, l in zip(scores, labels) if l]
    neg = [s for s, l in zip(scores, labels) if not l]
    total = 0.0
    for p, q in itertools.product(pos, neg):
        total += 1.0 if p > q else 0.5 if p == q else 0.0
    return total / (len(pos) * len(neg))


def aupro(samples, cap):
    """samples: list of (scores, labels, region_ids). Regions keyed by id."""
    thresholds = sorted({s for sc, _, _ in samples for s in sc}, reverse=True)
    normals = sum(1 for _, lab, _ in samples for l in lab if not l)
    regions = []
    for sc, lab, rid in samples:
        for r in sorted({r for r, l in zip(rid, lab) if l}):
            regions.append([sc[i] for i in range(len(sc)) if lab[i] and rid[i] == r])
    curve = []
    for t in thresholds:
        fp = sum(1 for sc, lab, _ in samples for s, l in zip(sc, lab) if not l and s >= t)
        pro = sum(sum(1 for s in reg if s >= t) / len(reg) for reg in regions) / len(regions)
        curve.append((fp / normals, pro))
    curve = [(0.0, curve[0][1])] + curve
    area = 0.0
    for (x0, y0), (x1, y1) in zip(curve, curve[1:]):
        if x0 >= cap:
            break
        if x1 > cap:
            y1 = y0 + (y1 - y0) * (cap - x0) / (x1 - x0)
            x1 = cap
        area += (x1 - x0) * (y0 + y1) / 2
    return area / cap


def metric_values():
    show("auroc tie case", auroc_pairs([1, 2, 2, 3], [0, 1, 0, 1]))
    scores = [0.9, 0.3, 0.8, 0.7, 0.2, 0.1]
    labels = [1, 1, 0, 1, 0, 0]
    ids = [1, 1, 0, 1, 0, 0]
    show("aupro 6-point cap 0.3", aupro([(scores, labels, ids)], 0.3))
    show("aupro 6-point cap 1.0", aupro([(scores, labels, ids)], 1.0))
    show("aupro all equal cap 0.3", aupro([([0.5] * 4, [1, 0, 1, 0], [1, 0, 2, 0])], 0.3))


# ---------------------------------------------------------------- geometry
def geometry_values():
    pts = np.array([[0, 0, 0], [3, 0, 0], [0, 2, 0], [0, 0, 1]], dtype=float)
    c = pts.mean(axis=0)
    d = np.linalg.norm(pts - c, axis=1)
    order = sorted(range(4), key=lambda i: (-d[i], i))
    i1 = order[0]
    i2 = next(i for i in order[1:] if np.linalg.matrix_rank(np.array([pts[i1] - c, pts[i] - c])) == 2)
    i3 = next(
        i
        for i in sorted(range(4), key=lambda i: (d[i], i))
        if np.linalg.matrix_rank(np.array([pts[i1] - c, pts[i2] - c, pts[i] - c])) == 3
    )
    show("key indices", [i1, i2, i3])
    show("max centroid distance", d.max())


# ---------------------------------------------------------------- formats
def format_values():
    header = b"ply\nformat binary_little_endian 1.0\nelement vertex 2\n"
    header += b"property float x\nproperty float y\nproperty float z\nproperty uchar red\n"
    header += b"element face 0\nproperty list uchar int vertex_indices\nend_header\n"
    body = struct.pack("<fffB", 1.5, -2.0, 0.25, 7) + struct.pack("<fffB", 0.0, 3.0, -1.0, 9)
    print("binary ply bytes hex =", (header + body).hex())
    print("empty RIFW file hex =", (b"RIFW" + struct.pack("<II", 1, 0)).hex())
    one = b"RIFW" + struct.pack("<II", 1, 1) + struct.pack("<H", 1) + b"t" + struct.pack("<BII", 2, 1, 2)
    one += struct.pack("<ff", 1.0, -2.5)
    print("one-tensor RIFW file hex =", one.hex())


if __name__ == "__main__":
    stream_values()
    augment_values()
    init_values()
    network_values()
    metric_values()
    geometry_values()
    format_values()
