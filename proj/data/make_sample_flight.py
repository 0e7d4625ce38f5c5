"""Generates data/sample_flight.csv: a synthetic 120 s quadrotor-like flight.

Pitch/roll oscillations with a coordinated yaw sweep for 60 s, then hover.
Thrust is along body z and keeps altitude, so the translation acceleration is
rddot = T C e3 - g with T = |g| / (C e3)_z. Ground truth only; no noise.
"""
import numpy as np

RATE = 25.0
T_END = 120.0
G = np.array([0.0, 0.0, 9.81])


def omega(t):
    if t >= 60.0:
        return np.zeros(3)
    env = np.sin(np.pi * t / 60.0) ** 2
    return np.radians([40.0 * env * np.sin(2 * np.pi * 0.25 * t),
                       30.0 * env * np.sin(2 * np.pi * 0.18 * t + 0.7),
                       12.0 * np.sin(2 * np.pi * 1 / 60.0 * t)])


def qmul(a, b):
    w1, x1, y1, z1 = a
    w2, x2, y2, z2 = b
    return np.array([w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
                     w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
                     w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
                     w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2])


def qdot(q, w):
    return 0.5 * qmul(q, np.concatenate(([0.0], w)))


def dcm(q):
    w, x, y, z = q
    return np.array([[1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
                     [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
                     [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)]])


def main():
    sub = 20
    dt = 1.0 / RATE / sub
    q = np.array([1.0, 0.0, 0.0, 0.0])
    rows = []
    n = int(round(T_END * RATE))
    for k in range(n + 1):
        t = k / RATE
        c = dcm(q)
        e3 = c[:, 2]
        rddot = 9.81 / e3[2] * e3 - G
        rows.append((t, *q, *omega(t), *rddot))
        for j in range(sub):
            ts = t + j * dt
            k1 = qdot(q, omega(ts))
            k2 = qdot(q + 0.5 * dt * k1, omega(ts + 0.5 * dt))
            k3 = qdot(q + 0.5 * dt * k2, omega(ts + 0.5 * dt))
            k4 = qdot(q + dt * k3, omega(ts + dt))
            q = q + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            q /= np.linalg.norm(q)
    with open("sample_flight.csv", "w") as f:
        f.write("# synthetic sample flight, 25 Hz, 120 s; see make_sample_flight.py\n")
        f.write("t,qw,qx,qy,qz,wx,wy,wz,ax,ay,az\n")
        for r in rows:
            f.write(",".join(f"{v:.10g}" for v in r) + "\n")


if __name__ == "__main__":
    main()
