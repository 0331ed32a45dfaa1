"""Image similarity via the empirical inaccuracy ratio of grey-level distributions.

An image is reduced to the sorted multiset of its pixel intensities in [0, 1].
A candidate is scored against an anchor (or the mean over a set of anchors)
with the plug-in inaccuracy ratio; scores near 1 mean similar intensity
distributions.  Pairs are classified by comparing their scores.
"""

from __future__ import annotations

import csv
import itertools
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from survext import kernels
from survext.empirical import EmpiricalSample, estimate_inaccuracy_ratio
from survext.errors import DataError, DegenerateDenominator, FileError, InsufficientData

TIE_RULE = "equal scores: first image of the pair takes the earlier label"


@dataclass(frozen=True, eq=False)
class ImageSample:
    label: str
    pixels: np.ndarray
    width: int = 28
    height: int = 28

    def __post_init__(self):
        p = np.asarray(self.pixels, dtype=float).ravel()
        if p.size != self.width * self.height:
            raise DataError(f"image has {p.size} pixels, expected {self.width}x{self.height}")
        if not np.all((p >= 0) & (p <= 1)):
            raise DataError("pixel values must lie in [0, 1]")
        object.__setattr__(self, "pixels", p)

    @property
    def zero_fraction(self) -> float:
        return float(np.mean(self.pixels == 0))


@dataclass(frozen=True)
class ClassificationRule:
    anchor_label: str
    ordering: tuple  # labels, lowest expected ratio first

    def __post_init__(self):
        if len(set(self.ordering)) != len(self.ordering):
            raise ValueError("ordering contains duplicate labels")


def image_to_sample(img: ImageSample) -> EmpiricalSample:
    return EmpiricalSample(img.pixels)


def _anchors(anchor) -> list:
    return [anchor] if isinstance(anchor, ImageSample) else list(anchor)


def ratio_score(anchor, candidate: ImageSample) -> float:
    """Inaccuracy ratio of ``candidate`` against one anchor or the mean over several."""
    anchors = _anchors(anchor)
    if len(anchors) == 1:
        return estimate_inaccuracy_ratio(image_to_sample(anchors[0]), image_to_sample(candidate))
    return float(score_matrix(anchors, [candidate]).mean())


def _sorted_rows(images) -> np.ndarray:
    return np.ascontiguousarray(np.sort(np.stack([im.pixels for im in images]), axis=1))


def score_matrix(anchors, candidates) -> np.ndarray:
    """Ratios of every candidate (columns) against every anchor (rows)."""
    A = _sorted_rows(anchors)
    if np.any(A[:, 0] == A[:, -1]):
        raise DegenerateDenominator("an anchor image has constant pixels")
    return kernels.ratio_matrix(A, _sorted_rows(candidates))


def mean_scores(anchors, candidates) -> np.ndarray:
    return score_matrix(anchors, candidates).mean(axis=0)


def _assign(score_a: float, score_b: float, ordering) -> tuple:
    first, second = ordering
    if score_a <= score_b:
        return first, second
    return second, first


def classify_pair(anchor, a: ImageSample, b: ImageSample, rule: ClassificationRule) -> dict:
    """Give the lower-scoring image the earlier label of ``rule.ordering``."""
    if len(rule.ordering) != 2:
        raise ValueError("classify_pair needs a rule ordering exactly two labels")
    sa, sb = ratio_score(anchor, a), ratio_score(anchor, b)
    la, lb = _assign(sa, sb, rule.ordering)
    return {"a": la, "b": lb, "score_a": sa, "score_b": sb, "tie": sa == sb, "tie_rule": TIE_RULE}


def event_probability(scores_a: np.ndarray, scores_b: np.ndarray) -> tuple[int, float]:
    """Count and frequency of score_A < score_B over the full cross product."""
    sb = np.sort(scores_b)
    # for each a, number of b strictly greater
    count = int(np.sum(sb.size - np.searchsorted(sb, scores_a, side="right")))
    return count, count / (scores_a.size * scores_b.size)


def evaluate_protocol(train, test, anchor_label: str, pair, seed: int, *, sizes=None,
                      anchor_mode: str = "mean") -> dict:
    """Train on event frequencies, then classify equal-sized test pairs.

    Training scores every image of the two target classes against the anchor
    set and counts P(score_A < score_B) over all cross pairs; that decides
    which label is expected to score lower.  Test images of each class are
    shuffled with ``seed`` and matched one-to-one; within each matched pair the
    presentation order is also randomised.
    """
    la, lb = pair
    by_train, by_test = _group(train), _group(test)
    anchors = by_train.get(anchor_label, [])
    if not anchors:
        raise InsufficientData(f"no training images with anchor label {anchor_label!r}")
    for lab in (la, lb):
        if len(by_train.get(lab, [])) < 1 or len(by_test.get(lab, [])) < 1:
            raise InsufficientData(f"label {lab!r} needs training and test images")
    rng = np.random.default_rng(seed)
    if anchor_mode == "single":
        anchors = [anchors[int(rng.integers(len(anchors)))]]
    elif anchor_mode != "mean":
        raise ValueError("anchor_mode must be 'mean' or 'single'")

    tr_a, tr_b = mean_scores(anchors, by_train[la]), mean_scores(anchors, by_train[lb])
    count, prob = event_probability(tr_a, tr_b)
    ordering = (la, lb) if prob >= 0.5 else (lb, la)

    te_a, te_b = mean_scores(anchors, by_test[la]), mean_scores(anchors, by_test[lb])
    perm_a, perm_b = rng.permutation(te_a.size), rng.permutation(te_b.size)
    k_max = min(te_a.size, te_b.size)
    sizes = [k_max] if sizes is None else [int(s) for s in sizes if s <= k_max]
    swaps = rng.random(k_max) < 0.5
    rows = []
    for k in sizes:
        correct = {la: 0, lb: 0}
        ties = 0
        for i in range(k):
            sa, sb = te_a[perm_a[i]], te_b[perm_b[i]]
            # presentation order decides who wins an exact tie
            if swaps[i]:
                got_b, got_a = _assign(sb, sa, ordering)
            else:
                got_a, got_b = _assign(sa, sb, ordering)
            ties += sa == sb
            correct[la] += got_a == la
            correct[lb] += got_b == lb
        rows.append({"n": [k, k], "N": 2 * k, f"correct_{la}": correct[la], f"correct_{lb}": correct[lb],
                     "accuracy": (correct[la] + correct[lb]) / (2 * k), "ties": int(ties)})
    return {
        "anchor_label": anchor_label, "pair": [la, lb], "anchor_mode": anchor_mode,
        "anchor_count": len(anchors), "seed": seed, "ordering": list(ordering),
        "training_event": {"event": f"I({anchor_label},{la}) < I({anchor_label},{lb})",
                           "count": count, "total": int(tr_a.size * tr_b.size), "probability": prob},
        "training_mean_scores": {la: float(tr_a.mean()), lb: float(tr_b.mean())},
        "zero_pixel_fraction": float(np.mean([im.zero_fraction for im in itertools.chain(train, test)])),
        "tie_rule": TIE_RULE,
        "classification": rows,
    }


def _group(images) -> dict:
    out = defaultdict(list)
    for im in images:
        out[im.label].append(im)
    return out


# --- ingestion ------------------------------------------------------------------------------

def read_images_csv(path, width: int = 28, height: int = 28) -> list[ImageSample]:
    """Rows of ``label, p_1, ..., p_{W*H}``; values above 1 are taken as bytes and divided by 255."""
    images = []
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            for lineno, row in enumerate(csv.reader(fh), start=1):
                if not row:
                    continue
                try:
                    vals = np.array([float(v) for v in row[1:]])
                except ValueError:
                    if lineno == 1:
                        continue  # header
                    raise DataError(f"{path}:{lineno}: non-numeric pixel value") from None
                if vals.size and vals.max() > 1:
                    vals = vals / 255.0
                images.append(ImageSample(row[0].strip(), vals, width, height))
    except OSError as exc:
        raise FileError(f"cannot read {path}: {exc}") from exc
    if not images:
        raise DataError(f"{path}: no images")
    return images


def read_pgm(path, label: str) -> ImageSample:
    """Read a binary (P5) or ASCII (P2) greymap."""
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise FileError(f"cannot read {path}: {exc}") from exc
    magic = data[:2]
    if magic not in (b"P2", b"P5"):
        raise DataError(f"{path}: not a PGM file")
    # header tokens: magic, width, height, maxval (comments start with #)
    tokens, pos = [], 2
    while len(tokens) < 3:
        while data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            pos = data.index(b"\n", pos) + 1
            continue
        start = pos
        while not data[pos:pos + 1].isspace():
            pos += 1
        tokens.append(int(data[start:pos]))
    width, height, maxval = tokens
    if magic == b"P5":
        body = data[pos + 1:]
        dtype = ">u2" if maxval > 255 else "u1"
        pix = np.frombuffer(body, dtype=dtype, count=width * height).astype(float)
    else:
        pix = np.array(data[pos:].split(), dtype=float)[: width * height]
    return ImageSample(label, pix / maxval, width, height)
