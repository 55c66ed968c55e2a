import numpy as np
import pytest
from scipy.spatial.transform import Rotation, Slerp

from pointplan import transforms as tf


def scipy_quat(q):
    # scipy uses xyzw ordering
    return Rotation.from_quat([q[1], q[2], q[3], q[0]])


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def test_quat_to_matrix_matches_scipy(rng):
    for _ in range(100):
        q = tf.random_quat(rng)
        assert np.allclose(tf.quat_to_matrix(q), scipy_quat(q).as_matrix(), atol=1e-12)


def test_quat_multiply_matches_matrix_product(rng):
    for _ in range(100):
        a, b = tf.random_quat(rng), tf.random_quat(rng)
        m = tf.quat_to_matrix(tf.quat_multiply(a, b))
        assert np.allclose(m, tf.quat_to_matrix(a) @ tf.quat_to_matrix(b), atol=1e-12)


def test_rotvec_round_trip(rng):
    for _ in range(200):
        rv = rng.normal(size=3)
        rv *= rng.uniform(0, np.pi * 0.999) / np.linalg.norm(rv)
        q = tf.quat_from_rotvec(rv)
        assert np.allclose(scipy_quat(q).as_rotvec(), rv, atol=1e-9)
        assert np.allclose(tf.quat_to_rotvec(q), rv, atol=1e-9)


def test_rotvec_beyond_pi_maps_to_same_rotation(rng):
    # the log map returns the canonical representative; only the rotation
    # itself is preserved for angles above pi
    rv = np.array([0.0, 0.0, 1.5 * np.pi])
    q = tf.quat_from_rotvec(rv)
    back = tf.quat_to_rotvec(q)
    assert np.linalg.norm(back) <= np.pi + 1e-12
    assert np.allclose(tf.quat_to_matrix(tf.quat_from_rotvec(back)),
                       tf.quat_to_matrix(q), atol=1e-12)


def test_rotvec_zero_is_identity():
    q = tf.quat_from_rotvec(np.zeros(3))
    assert np.allclose(q, tf.IDENTITY_QUAT)
    assert np.allclose(tf.quat_to_rotvec(tf.IDENTITY_QUAT), np.zeros(3))


def test_slerp_matches_scipy(rng):
    for _ in range(50):
        a, b = tf.random_quat(rng), tf.random_quat(rng)
        times = [0.0, 1.0]
        sl = Slerp(times, Rotation.from_quat([
            [a[1], a[2], a[3], a[0]], [b[1], b[2], b[3], b[0]]]))
        for t in (0.0, 0.25, 0.5, 0.9, 1.0):
            ours = tf.quat_to_matrix(tf.quat_slerp(a, b, t))
            theirs = sl([t]).as_matrix()[0]
            assert np.allclose(ours, theirs, atol=1e-9)


def test_slerp_endpoints(rng):
    a, b = tf.random_quat(rng), tf.random_quat(rng)
    assert np.allclose(tf.quat_slerp(a, b, 0.0), a)
    q1 = tf.quat_slerp(a, b, 1.0)
    assert np.allclose(q1, b) or np.allclose(q1, -b)


def test_quat_angle_symmetry(rng):
    for _ in range(100):
        a, b = tf.random_quat(rng), tf.random_quat(rng)
        ang = tf.quat_angle(a, b)
        assert 0.0 <= ang <= np.pi + 1e-12
        assert np.isclose(ang, tf.quat_angle(b, a))
        # angle equals the norm of the relative rotation vector
        rel = tf.quat_multiply(tf.quat_conjugate(a), b)
        assert np.isclose(ang, np.linalg.norm(tf.quat_to_rotvec(rel)), atol=1e-9)


def test_random_quat_is_uniformish(rng):
    qs = np.array([tf.random_quat(rng) for _ in range(4000)])
    assert np.allclose(np.linalg.norm(qs, axis=1), 1.0, atol=1e-12)
    # component means vanish for a uniform distribution on S^3
    assert np.all(np.abs(qs.mean(axis=0)) < 0.05)


def test_planar_angle_quat():
    q = tf.quat_from_planar_angle(np.pi / 2)
    v = tf.quat_rotate(q, np.array([1.0, 0.0, 0.0]))
    assert np.allclose(v, [0.0, 1.0, 0.0], atol=1e-12)
