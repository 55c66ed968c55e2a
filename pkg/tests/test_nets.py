import numpy as np
import pytest

from pointplan.nets import (
    CNNEncoder,
    CriticHead,
    GaussianPolicy,
    MLP,
    ObsSpec,
    ParamBuilder,
    PointNetEncoder,
    TanhGaussianHead,
    head_input,
    load_checkpoint,
    obs_spec_for_env,
    save_checkpoint,
    squash_sample,
)
from pointplan.nets.heads import tanh_gaussian_log_prob
from oracles import assert_grads_close, finite_difference_grad


@pytest.fixture
def rng():
    return np.random.default_rng(77)


def make_mlp(rng, in_dim=5, hidden=(7, 6), out_dim=4, final_scale=1.0):
    builder = ParamBuilder(rng)
    mlp = MLP(builder, "net", in_dim, list(hidden), out_dim,
              final_scale=final_scale)
    store = builder.build()
    return mlp.bind(store), store


# ----------------------------------------------------------------------- MLP

def test_zero_final_layer_outputs_zero(rng):
    mlp, store = make_mlp(rng)
    store.view("net.l2.w")[:] = 0.0
    store.view("net.l2.b")[:] = 0.0
    y, _ = mlp.forward(rng.normal(size=(3, 5)))
    assert np.allclose(y, 0.0)


def test_identity_linear_layer(rng):
    builder = ParamBuilder(rng)
    mlp = MLP(builder, "lin", 4, [], 4)
    store = builder.build()
    mlp.bind(store)
    store.view("lin.l0.w")[:] = np.eye(4)
    store.view("lin.l0.b")[:] = 0.0
    x = rng.normal(size=(2, 4))
    y, _ = mlp.forward(x)
    assert np.allclose(y, x)


def test_mlp_shape_mismatch(rng):
    mlp, _ = make_mlp(rng)
    with pytest.raises(ValueError):
        mlp.forward(np.zeros((2, 9)))


def test_mlp_param_gradcheck(rng):
    mlp, store = make_mlp(rng)
    x = rng.normal(size=(3, 5))
    w = rng.normal(size=(3, 4))

    def loss():
        y, _ = mlp.forward(x)
        return float((y * w).sum())

    y, cache = mlp.forward(x)
    store.zero_grad()
    mlp.backward(cache, w)
    assert_grads_close(store.grad, finite_difference_grad(store, loss))


def test_mlp_input_gradcheck(rng):
    mlp, store = make_mlp(rng)
    x = rng.normal(size=(2, 5))
    w = rng.normal(size=(2, 4))
    _, cache = mlp.forward(x)
    dx = mlp.backward(cache, w, accumulate=False)
    h = 1e-5
    num = np.zeros_like(x)
    for i in range(x.shape[0]):
        for j in range(x.shape[1]):
            xp = x.copy(); xp[i, j] += h
            xm = x.copy(); xm[i, j] -= h
            num[i, j] = ((mlp.forward(xp)[0] * w).sum()
                         - (mlp.forward(xm)[0] * w).sum()) / (2 * h)
    assert_grads_close(dx, num)


# ------------------------------------------------------------------ PointNet

def make_pointnet(rng, pf=4, hidden=(8, 8), feat=6):
    builder = ParamBuilder(rng)
    enc = PointNetEncoder(builder, pf, list(hidden), feat)
    store = builder.build()
    return enc.bind(store), store


def test_pointnet_permutation_invariance_exact(rng):
    enc, _ = make_pointnet(rng)
    cloud = rng.normal(size=(2, 9, 4))
    base, _ = enc.forward({"cloud": cloud})
    for _ in range(10):
        perm = rng.permutation(9)
        out, _ = enc.forward({"cloud": cloud[:, perm]})
        assert np.array_equal(out, base)


def test_pointnet_duplication_invariance(rng):
    enc, _ = make_pointnet(rng)
    cloud = rng.normal(size=(1, 6, 4))
    base, _ = enc.forward({"cloud": cloud})
    dup = np.concatenate([cloud, cloud[:, :3]], axis=1)
    out, _ = enc.forward({"cloud": dup})
    assert np.array_equal(out, base)


def test_pointnet_singleton(rng):
    enc, _ = make_pointnet(rng)
    cloud = rng.normal(size=(1, 1, 4))
    pooled, _ = enc.forward({"cloud": cloud})
    flat, _ = enc.point_mlp.forward(cloud[0])
    assert np.allclose(pooled, flat)


def test_pointnet_gradcheck(rng):
    enc, store = make_pointnet(rng)
    cloud = rng.normal(size=(3, 5, 4))
    w = rng.normal(size=(3, 6))

    def loss():
        pooled, _ = enc.forward({"cloud": cloud})
        return float((pooled * w).sum())

    pooled, cache = enc.forward({"cloud": cloud})
    store.zero_grad()
    enc.backward(cache, w)
    assert_grads_close(store.grad, finite_difference_grad(store, loss))


# ----------------------------------------------------------------------- CNN

def test_cnn_zero_image_zero_feature(rng):
    builder = ParamBuilder(rng)
    enc = CNNEncoder(builder, 8, channels=4)
    store = builder.build()
    enc.bind(store)
    for i in range(3):
        store.view(f"cnn.c{i}.b")[:] = 0.0
    feat, _ = enc.forward({"image": np.zeros((2, 8, 8))})
    assert np.allclose(feat, 0.0)


def test_cnn_not_translation_invariant(rng):
    builder = ParamBuilder(rng)
    enc = CNNEncoder(builder, 8, channels=4)
    enc.bind(builder.build())
    img = np.zeros((1, 8, 8))
    img[0, 2, 2] = 1.0
    shifted = np.roll(img, 1, axis=2)
    a, _ = enc.forward({"image": img})
    b, _ = enc.forward({"image": shifted})
    assert not np.allclose(a, b)


def test_cnn_rejects_wrong_resolution(rng):
    builder = ParamBuilder(rng)
    enc = CNNEncoder(builder, 8, channels=4)
    enc.bind(builder.build())
    with pytest.raises(ValueError):
        enc.forward({"image": np.zeros((1, 16, 16))})


def test_cnn_gradcheck(rng):
    builder = ParamBuilder(rng)
    enc = CNNEncoder(builder, 8, channels=3)
    store = builder.build()
    enc.bind(store)
    img = rng.normal(size=(2, 8, 8))
    w = rng.normal(size=(2, enc.feat_dim))

    def loss():
        feat, _ = enc.forward({"image": img})
        return float((feat * w).sum())

    feat, cache = enc.forward({"image": img})
    store.zero_grad()
    enc.backward(cache, w)
    assert_grads_close(store.grad, finite_difference_grad(store, loss))


# ------------------------------------------------------------ tanh gaussian

def test_squash_deterministic_zero():
    a, logp, _ = squash_sample(np.zeros((1, 3)), np.zeros((1, 3)),
                               deterministic=True)
    assert np.allclose(a, 0.0)
    assert logp is None


def test_squash_range(rng):
    a, _, _ = squash_sample(np.zeros((100_000, 1)), np.full((100_000, 1), 0.5),
                            rng=rng)
    assert np.all(a > -1.0) and np.all(a < 1.0)


def test_log_prob_integrates_to_one():
    # quadrature over the action interval for a 1D squashed Gaussian
    mean, log_std = 0.3, -0.4
    std = np.exp(log_std)
    a = np.linspace(-1 + 1e-9, 1 - 1e-9, 400_001)
    z = np.arctanh(a)
    noise = (z - mean) / std
    logp = tanh_gaussian_log_prob(np.full_like(z, log_std)[:, None],
                                  z[:, None], noise[:, None])
    integral = np.trapezoid(np.exp(logp), a)
    assert abs(integral - 1.0) < 1e-3


def test_head_gradcheck_action_and_logp(rng):
    builder = ParamBuilder(rng)
    head = TanhGaussianHead(builder, 5, [8], 3)
    store = builder.build()
    head.bind(store)
    x = rng.normal(size=(4, 5))
    wa = rng.normal(size=(4, 3))
    wl = rng.normal(size=4)

    def loss():
        a, logp, _ = head.forward(x, rng=np.random.default_rng(123))
        return float((a * wa).sum() + (logp * wl).sum())

    a, logp, cache = head.forward(x, rng=np.random.default_rng(123))
    store.zero_grad()
    head.backward(cache, d_action=wa, d_logp=wl)
    assert_grads_close(store.grad, finite_difference_grad(store, loss))


def test_critic_head_gradcheck(rng):
    builder = ParamBuilder(rng)
    critic = CriticHead(builder, 6, [8, 8])
    store = builder.build()
    critic.bind(store)
    x = rng.normal(size=(5, 6))
    w = rng.normal(size=5)

    def loss():
        q, _ = critic.forward(x)
        return float((q * w).sum())

    q, cache = critic.forward(x)
    store.zero_grad()
    critic.backward(cache, w)
    assert_grads_close(store.grad, finite_difference_grad(store, loss))


# ---------------------------------------------------------------------- Adam

def test_adam_zero_grad_no_change(rng):
    _, store = make_mlp(rng)
    before = store.data.copy()
    store.zero_grad()
    store.adam_update(lr=1e-3)
    assert np.array_equal(store.data, before)


def test_adam_first_step_magnitude(rng):
    _, store = make_mlp(rng)
    g = rng.normal(size=store.size)
    g[np.abs(g) < 0.01] = 0.01  # keep eps negligible
    store.grad[:] = g
    before = store.data.copy()
    store.adam_update(lr=3e-4)
    update = before - store.data
    assert np.allclose(update, 3e-4 * np.sign(g), atol=1e-6)
    assert np.all(store.grad == 0.0)


def test_adam_matches_scalar_recurrence(rng):
    # 10 steps on a fixed quadratic versus an independent reimplementation
    builder = ParamBuilder(rng)
    builder.scalar("theta", 1.7)
    store = builder.build()
    lr, b1, b2, eps = 1e-2, 0.9, 0.999, 1e-8
    theta_ref, m_ref, v_ref = 1.7, 0.0, 0.0
    for t in range(1, 11):
        g = 2.0 * (store.view("theta")[0] - 0.3)
        store.grad_view("theta")[0] = g
        store.adam_update(lr, b1, b2, eps)
        g_ref = 2.0 * (theta_ref - 0.3)
        m_ref = b1 * m_ref + (1 - b1) * g_ref
        v_ref = b2 * v_ref + (1 - b2) * g_ref ** 2
        theta_ref -= lr * (m_ref / (1 - b1 ** t)) / (
            np.sqrt(v_ref / (1 - b2 ** t)) + eps)
        assert abs(store.view("theta")[0] - theta_ref) < 1e-12


def test_adam_rejects_nonfinite(rng):
    _, store = make_mlp(rng)
    store.grad[0] = np.nan
    with pytest.raises(FloatingPointError):
        store.adam_update(lr=1e-3)


# ----------------------------------------------------------------- policies

def small_policy(rng, cloud_points=6, point_size=4, action_size=2):
    spec = ObsSpec(goal_size=2, action_size=action_size,
                   cloud_points=cloud_points, point_size=point_size)
    net = {"kind": "pointnet", "point_hidden": [8], "feature_size": 6,
           "head_hidden": [8]}
    return GaussianPolicy(spec, net, rng), spec


def test_policy_forward_backward_gradcheck(rng):
    policy, spec = small_policy(rng)
    batch = {"cloud": rng.normal(size=(3, 6, 4)), "goal": rng.normal(size=(3, 2))}
    wa = rng.normal(size=(3, 2))

    def loss():
        a, _, _ = policy.forward(batch, deterministic=True)
        return float((a * wa).sum())

    a, _, cache = policy.forward(batch, deterministic=True)
    policy.store.zero_grad()
    policy.backward(cache, d_action=wa)
    assert_grads_close(policy.store.grad,
                       finite_difference_grad(policy.store, loss))


def test_default_pointnet_parameter_count(rng):
    # closed-form parameter count for the published layer sizes
    spec = ObsSpec(goal_size=2, action_size=2, cloud_points=16, point_size=4)
    net = {"kind": "pointnet", "point_hidden": [256, 256], "feature_size": 256,
           "head_hidden": [256, 256, 256]}
    policy = GaussianPolicy(spec, net, rng)

    def affine(i, o):
        return i * o + o

    expected = (affine(4, 256) + affine(256, 256) + affine(256, 256)      # u
                + affine(256 + 2, 256) + affine(256, 256)
                + affine(256, 256) + affine(256, 4))                      # head
    assert policy.store.size == expected


def test_checkpoint_round_trip(tmp_path, rng):
    policy, _ = small_policy(rng)
    policy.store.grad[:] = rng.normal(size=policy.store.size)
    policy.store.adam_update(lr=1e-3)
    path = tmp_path / "policy.ckpt"
    policy.save(path, extra_config={"note": "round-trip"})
    loaded, cfg = GaussianPolicy.load(path)
    assert np.array_equal(loaded.store.data, policy.store.data)
    assert np.array_equal(loaded.store.adam_m, policy.store.adam_m)
    assert np.array_equal(loaded.store.adam_v, policy.store.adam_v)
    assert loaded.store.adam_step_count == policy.store.adam_step_count
    assert cfg["note"] == "round-trip"
    batch = {"cloud": rng.normal(size=(2, 6, 4)), "goal": rng.normal(size=(2, 2))}
    a1, _, _ = policy.forward(batch, deterministic=True)
    a2, _, _ = loaded.forward(batch, deterministic=True)
    assert np.array_equal(a1, a2)


def test_save_checkpoint_multiple_stores(tmp_path, rng):
    _, s1 = make_mlp(rng)
    _, s2 = make_mlp(rng, in_dim=3, hidden=(4,), out_dim=2)
    save_checkpoint(tmp_path / "multi.ckpt", {"a": s1, "b": s2},
                    config={"k": 1})
    stores, cfg = load_checkpoint(tmp_path / "multi.ckpt")
    assert set(stores) == {"a", "b"}
    assert np.array_equal(stores["a"].data, s1.data)
    assert np.array_equal(stores["b"].data, s2.data)
    assert cfg == {"k": 1}


def test_obs_spec_for_env():
    from pointplan.envs import EnvConfig, PlanningEnv

    env = PlanningEnv("2d_narrow", EnvConfig(cloud_size=32))
    spec = obs_spec_for_env(env)
    assert spec == ObsSpec(goal_size=2, action_size=2, cloud_points=32,
                           point_size=4)
    env_img = PlanningEnv("2d_narrow", EnvConfig(representation="image",
                                                 image_resolution=16))
    spec_img = obs_spec_for_env(env_img)
    assert spec_img.image_resolution == 16 and spec_img.state_size == 2
    env_loc = PlanningEnv("slot", EnvConfig(observability="local",
                                            cloud_size=16, ray_count=32,
                                            max_steps=80))
    spec_loc = obs_spec_for_env(env_loc)
    assert spec_loc.point_size == 6 and spec_loc.action_size == 6
    assert spec_loc.goal_size == 6
