"""Plain-text portable pixmap (P3) output."""

import numpy as np

# attractor index -> RGB; index 0 is unresolved
BASIN_PALETTE = np.array([[0, 0, 0], [255, 0, 0], [0, 255, 0], [0, 0, 255]], dtype=np.uint8)


def basin_rgb(cells):
    return BASIN_PALETTE[np.asarray(cells, dtype=np.intp)]


def encode_ppm(rgb):
    """P3 bytes for an (height, width, 3) uint8 array, one pixel per line."""
    rgb = np.asarray(rgb)
    if rgb.ndim != 3 or rgb.shape[2] != 3:
        raise ValueError("expected an (height, width, 3) array")
    h, w, _ = rgb.shape
    header = f"P3\n{w} {h}\n255\n"
    body = "\n".join(f"{r} {g} {b}" for r, g, b in rgb.reshape(-1, 3).tolist())
    return (header + body + "\n").encode("ascii")


def write_ppm(path, rgb):
    with open(path, "wb") as fh:
        fh.write(encode_ppm(rgb))


def read_ppm(path):
    """Parse a P3 file (comments allowed) into an (height, width, 3) array."""
    tokens = []
    with open(path, encoding="ascii") as fh:
        for line in fh:
            tokens.extend(line.split("#", 1)[0].split())
    if not tokens or tokens[0] != "P3":
        raise ValueError("not a plain-text P3 pixmap")
    w, h, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    data = np.array(tokens[4:4 + 3 * w * h], dtype=np.int64)
    if data.size != 3 * w * h or np.any(data > maxval):
        raise ValueError("truncated or out-of-range pixmap data")
    return data.reshape(h, w, 3)
