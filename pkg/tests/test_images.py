import numpy as np
import pytest

from survext import images as I
from survext.errors import DataError, DegenerateDenominator, FileError, InsufficientData

CLASSES = {"lo": (2, 5), "mid": (2, 2), "hi": (5, 2)}


def _images(rng, per_class, classes=CLASSES, shape=(28, 28)):
    w, h = shape
    return [I.ImageSample(lab, rng.beta(a, b, w * h), w, h)
            for lab, (a, b) in classes.items() for _ in range(per_class)]


def test_image_validation():
    with pytest.raises(DataError):
        I.ImageSample("x", np.zeros(10))
    with pytest.raises(DataError):
        I.ImageSample("x", np.full(4, 1.5), 2, 2)
    img = I.ImageSample("x", [0, 0.5, 0.5, 1], 2, 2)
    assert img.zero_fraction == 0.25


def test_image_to_sample():
    img = I.ImageSample("x", [1.0, 0.5, 0.0, 0.5], 2, 2)
    assert I.image_to_sample(img).values.tolist() == [0.0, 0.5, 0.5, 1.0]
    white = I.ImageSample("w", np.ones(784))
    s = I.image_to_sample(white)
    assert len(s) == 784 and np.all(s.values == 1)


def test_self_ratio_is_one(rng):
    for img in _images(rng, 3):
        assert I.ratio_score(img, img) == 1.0


def test_ratio_ignores_pixel_order(rng):
    a, b = _images(rng, 1)[:2]
    shuffled = I.ImageSample(b.label, rng.permutation(b.pixels))
    assert I.ratio_score(a, b) == I.ratio_score(a, shuffled)


def test_degenerate_anchor():
    flat = I.ImageSample("f", np.full(784, 0.3))
    other = I.ImageSample("o", np.linspace(0, 1, 784))
    with pytest.raises(DegenerateDenominator):
        I.ratio_score(flat, other)
    with pytest.raises(DegenerateDenominator):
        I.score_matrix([flat], [other])


def test_same_distribution_ratio_near_one(rng):
    imgs = _images(rng, 200, {"mid": (2, 2)})
    scores = [I.ratio_score(imgs[2 * k], imgs[2 * k + 1]) for k in range(100)]
    assert abs(np.mean(scores) - 1) < 0.05


def test_mean_anchor_score_matches_matrix(rng):
    imgs = _images(rng, 4)
    anchors, cand = imgs[:4], imgs[6]
    assert I.ratio_score(anchors, cand) == pytest.approx(np.mean([I.ratio_score(a, cand) for a in anchors]),
                                                         rel=1e-12)


def test_classify_pair(rng):
    imgs = _images(rng, 1)
    anchor, lo, hi = imgs
    rule = I.ClassificationRule("mid", ("lo", "hi"))
    out = I.classify_pair(anchor, lo, hi, rule)
    assert (out["a"], out["b"]) == ("lo", "hi") and not out["tie"]
    swapped = I.classify_pair(anchor, hi, lo, rule)
    assert (swapped["a"], swapped["b"]) == ("hi", "lo")
    tie = I.classify_pair(anchor, lo, lo, rule)
    assert tie["tie"] and (tie["a"], tie["b"]) == ("lo", "hi")
    assert I.classify_pair(anchor, lo, hi, rule) == out


def test_rule_validation():
    with pytest.raises(ValueError):
        I.ClassificationRule("a", ("x", "x"))
    with pytest.raises(ValueError):
        I.classify_pair(None, None, None, I.ClassificationRule("a", ("x", "y", "z")))


def test_event_probability():
    count, p = I.event_probability(np.array([1.0, 2.0]), np.array([1.5, 3.0, 0.5]))
    assert count == 3 and p == pytest.approx(0.5)


def _uniform_images(rng, per_class, ranges):
    return [I.ImageSample(lab, rng.uniform(lo, hi, 784)) for lab, (lo, hi) in ranges.items()
            for _ in range(per_class)]


def test_protocol_separable(rng):
    # disjoint classes; the anchor spans both, otherwise their scores coincide
    ranges = {"A": (0.0, 1.0), "B": (0.0, 0.4), "C": (0.6, 1.0)}
    train, test = _uniform_images(rng, 25, ranges), _uniform_images(rng, 25, ranges)
    rep = I.evaluate_protocol(train, test, "A", ("B", "C"), seed=3)
    assert rep["classification"][0]["accuracy"] == 1.0
    assert rep["training_event"]["probability"] == 1.0
    assert rep["classification"][0]["N"] == 50


def test_protocol_identical_classes_is_coin_flip(rng):
    classes = {"A": (2, 2), "B": (2, 2), "C": (2, 2)}
    train, test = _images(rng, 60, classes), _images(rng, 200, classes)
    acc = I.evaluate_protocol(train, test, "A", ("B", "C"), seed=1)["classification"][0]["accuracy"]
    assert 0.4 < acc < 0.6


def test_protocol_shape_and_sizes(rng):
    classes = {"0": (2, 5), "1": (2, 3), "2": (3, 2)}
    train, test = _images(rng, 30, classes, (8, 8)), _images(rng, 200, classes, (8, 8))
    rep = I.evaluate_protocol(train, test, "0", ("1", "2"), seed=5, sizes=[50, 200])
    rows = rep["classification"]
    assert [r["N"] for r in rows] == [100, 400]
    assert rows[1]["n"] == [200, 200]
    assert 0 <= rep["zero_pixel_fraction"] <= 1


def test_event_probability_grows_with_sample(rng):
    # the sample behind each score is the pixel set of one image
    classes = {"A": (2, 5), "B": (2, 2.2), "C": (2.2, 2)}
    probs = []
    for shape in ((5, 10), (10, 20)):
        imgs = _images(rng, 40, classes, shape)
        rep = I.evaluate_protocol(imgs, imgs, "A", ("B", "C"), seed=0)
        probs.append(rep["training_event"]["probability"])
    assert probs[1] > probs[0]
    assert probs[1] > 0.9


def test_protocol_deterministic(rng):
    imgs = _images(rng, 20)
    a = I.evaluate_protocol(imgs, imgs, "mid", ("lo", "hi"), seed=9, anchor_mode="single")
    b = I.evaluate_protocol(imgs, imgs, "mid", ("lo", "hi"), seed=9, anchor_mode="single")
    assert a == b and a["anchor_count"] == 1


def test_protocol_errors(rng):
    imgs = _images(rng, 3)
    with pytest.raises(InsufficientData):
        I.evaluate_protocol(imgs, imgs, "zzz", ("lo", "hi"), 0)
    with pytest.raises(InsufficientData):
        I.evaluate_protocol(imgs, imgs, "mid", ("lo", "nope"), 0)
    with pytest.raises(ValueError):
        I.evaluate_protocol(imgs, imgs, "mid", ("lo", "hi"), 0, anchor_mode="median")


def test_read_images_csv(tmp_path, rng):
    p = tmp_path / "imgs.csv"
    rows = ["label," + ",".join(f"p{k}" for k in range(4))]
    rows += ["a,0,128,255,64", "b,0.1,0.2,0.3,0.4"]
    p.write_text("\n".join(rows) + "\n")
    imgs = I.read_images_csv(p, 2, 2)
    assert [im.label for im in imgs] == ["a", "b"]
    assert imgs[0].pixels[2] == 1.0 and imgs[0].pixels[1] == pytest.approx(128 / 255)
    assert imgs[1].pixels.tolist() == [0.1, 0.2, 0.3, 0.4]
    with pytest.raises(FileError):
        I.read_images_csv(tmp_path / "none.csv")
    bad = tmp_path / "bad.csv"
    bad.write_text("a,1,2,3,4\nb,1,x,3,4\n")
    with pytest.raises(DataError):
        I.read_images_csv(bad, 2, 2)


def test_read_pgm(tmp_path):
    p5 = tmp_path / "a.pgm"
    p5.write_bytes(b"P5\n# comment\n2 2\n255\n" + bytes([0, 51, 255, 102]))
    img = I.read_pgm(p5, "x")
    assert img.pixels.tolist() == pytest.approx([0, 0.2, 1, 0.4])
    p2 = tmp_path / "b.pgm"
    p2.write_text("P2\n2 2\n10\n0 5\n10 2\n")
    assert I.read_pgm(p2, "y").pixels.tolist() == pytest.approx([0, 0.5, 1, 0.2])
    bad = tmp_path / "c.pgm"
    bad.write_bytes(b"P6\n1 1\n255\n\x00\x00\x00")
    with pytest.raises(DataError):
        I.read_pgm(bad, "z")
