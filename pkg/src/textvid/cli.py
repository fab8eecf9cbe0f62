"""Command-line entrypoint: track, retrack, degrade, eval, synth, serve."""

from __future__ import annotations

import json
import sys

import click

from . import __version__
from .degradation import BlurConfig, LRConfig, blur_video, lr_video, remap_annotations
from .errors import TextvidError
from .evaluation import prf
from .failure import FailureParams
from .pipeline import FirstFrameBoxes, VideoSequence, retrack_from, run_pipeline
from .store import (SCHEMA_VERSION, BoundingBox, load_path, save_path, validate)
from .synth import MOTIONS, DEFAULT_SEED, generate_fixture
from .tracker import TrackerParams


def _fail(message: str) -> None:
    click.echo(json.dumps({"error": message}), err=True)
    sys.exit(1)


def _load_params(path: str | None) -> TrackerParams:
    if path is None:
        return TrackerParams()
    with open(path) as f:
        return TrackerParams.from_dict(json.load(f))


def _parse_trim(spec: str | None):
    if spec is None:
        return None
    a, _, b = spec.partition(":")
    return int(a), int(b)


def _failure_params(mode: str, alpha: float, beta: float) -> FailureParams | None:
    return FailureParams(alpha=alpha, beta=beta) if mode == "on" else None


@click.group()
@click.version_option(__version__, message=f"textvid {__version__} (schema {SCHEMA_VERSION})")
def main():
    """Semi-automatic scene-text video annotation toolkit."""


@main.command()
@click.option("--frames", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--first-boxes", "first_boxes", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Annotation document restricted to frame 1.")
@click.option("--params", "params_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--trim", default=None, help="A:B, 1-based inclusive frame range.")
@click.option("--failure-detection", "fd", type=click.Choice(["on", "off"]), default="on")
@click.option("--fd-alpha", type=float, default=0.25)
@click.option("--fd-beta", type=float, default=-0.2)
@click.option("--out", required=True, type=click.Path(dir_okay=False))
def track(frames, first_boxes, params_path, trim, fd, fd_alpha, fd_beta, out):
    """Propagate first-frame boxes through a frame sequence."""
    try:
        video = VideoSequence.open(frames, trim=_parse_trim(trim))
        doc1 = load_path(first_boxes)
        boxes = tuple(inst.entries[0].box for inst in doc1.instances)
        first = FirstFrameBoxes("manual", boxes)
        doc = run_pipeline(video, first, _load_params(params_path),
                           _failure_params(fd, fd_alpha, fd_beta))
        save_path(doc, out)
        click.echo(f"wrote {out}: {len(doc.instances)} instances x {doc.n_frame} frames")
    except (TextvidError, OSError, KeyError) as e:
        _fail(str(e))


@main.command()
@click.option("--doc", "doc_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--frames", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--instance", "instance_id", required=True)
@click.option("--frame", "frame_index", required=True, type=int)
@click.option("--box", "box_spec", required=True, help="x,y,w,h")
@click.option("--failure-detection", "fd", type=click.Choice(["on", "off"]), default="off")
@click.option("--fd-alpha", type=float, default=0.25)
@click.option("--fd-beta", type=float, default=-0.2)
@click.option("--out", required=True, type=click.Path(dir_okay=False))
def retrack(doc_path, frames, instance_id, frame_index, box_spec, fd, fd_alpha, fd_beta, out):
    """Correct one instance at one frame and re-propagate it to the end."""
    try:
        x, y, w, h = (float(v) for v in box_spec.split(","))
        doc = load_path(doc_path)
        video = VideoSequence.open(frames)
        revised = retrack_from(doc, video, instance_id, frame_index,
                               BoundingBox(x, y, w, h),
                               _failure_params(fd, fd_alpha, fd_beta))
        save_path(revised, out)
        click.echo(f"wrote {out}")
    except (TextvidError, OSError, KeyError, ValueError) as e:
        _fail(str(e))


@main.group()
def degrade():
    """Generate paired degraded videos and remap annotations."""


@degrade.command("blur")
@click.option("--n", type=int, default=5)
@click.option("--frames", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--out", required=True, type=click.Path(file_okay=False))
def degrade_blur(n, frames, out):
    try:
        count = blur_video(frames, out, BlurConfig(n=n))
        click.echo(f"wrote {count} blurred frames to {out}")
    except (TextvidError, OSError) as e:
        _fail(str(e))


@degrade.command("lr")
@click.option("--m", type=int, default=4)
@click.option("--frames", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--out", required=True, type=click.Path(file_okay=False))
def degrade_lr(m, frames, out):
    try:
        count = lr_video(frames, out, LRConfig(m=m))
        click.echo(f"wrote {count} LR frames to {out}")
    except (TextvidError, OSError) as e:
        _fail(str(e))


@degrade.command("remap")
@click.option("--doc", "doc_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--mode", required=True, type=click.Choice(["blur", "lr"]))
@click.option("--n", type=int, default=5)
@click.option("--m", type=int, default=4)
@click.option("--out", required=True, type=click.Path(dir_okay=False))
def degrade_remap(doc_path, mode, n, m, out):
    try:
        doc = load_path(doc_path)
        cfg = BlurConfig(n=n) if mode == "blur" else LRConfig(m=m)
        save_path(remap_annotations(doc, cfg), out)
        click.echo(f"wrote {out}")
    except (TextvidError, OSError) as e:
        _fail(str(e))


@main.command("eval")
@click.option("--pred", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--gt", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--iou-thresh", type=float, default=0.5)
@click.option("--report", "report_path", type=click.Path(dir_okay=False))
def eval_cmd(pred, gt, iou_thresh, report_path):
    """Score a predicted document against ground truth (P/R/F + mIoU)."""
    try:
        report = prf(load_path(pred), load_path(gt), threshold=iou_thresh)
        text = json.dumps(report.to_dict(), indent=2)
        if report_path:
            with open(report_path, "w") as f:
                f.write(text + "\n")
        click.echo(text)
    except (TextvidError, OSError) as e:
        _fail(str(e))


@main.command()
@click.option("--motion", required=True, type=click.Choice(list(MOTIONS)))
@click.option("--length", type=int, default=100)
@click.option("--seed", type=int, default=DEFAULT_SEED)
@click.option("--out", required=True, type=click.Path(file_okay=False))
def synth(motion, length, seed, out):
    """Render a deterministic test fixture plus its ground-truth document."""
    try:
        doc = generate_fixture(motion, length, out, seed=seed)
        gt_path = out.rstrip("/") + "/ground_truth.json"
        save_path(doc, gt_path)
        click.echo(f"wrote {length} frames + {gt_path}")
    except (TextvidError, OSError) as e:
        _fail(str(e))


@main.command()
@click.option("--doc", "doc_path", required=True, type=click.Path(exists=True, dir_okay=False))
def check(doc_path):
    """Validate an annotation document and list violations."""
    try:
        doc = load_path(doc_path)
    except TextvidError as e:
        _fail(str(e))
        return
    violations = validate(doc)
    for v in violations:
        click.echo(str(v))
    if violations:
        sys.exit(1)
    click.echo("ok")


@main.command()
@click.option("--port", type=int, default=8000)
@click.option("--host", default="127.0.0.1")
@click.option("--data-dir", required=True, type=click.Path(file_okay=False))
def serve(port, host, data_dir):
    """Run the annotation HTTP service (backs the browser UI)."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(data_dir), host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
