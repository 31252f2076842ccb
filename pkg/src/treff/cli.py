"""Command-line entry point.

Every JSON output embeds a run manifest (command, resolved flags, input file
digests, tool version, base seed) so runs are reproducible from the output
alone. Outputs carry no timestamps: identical flags give byte-identical files.

Exit codes: 0 success, 1 data/validation error, 2 usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .adapter import TrainConfig, treff_finetune
from .calm import save_params
from .episodes import METHODS, evaluate, shot_curve
from .metrics import PHI_SIGNS
from .store import (
    ClassVocabulary,
    EmbeddingSet,
    SupportSet,
    read_embeddings,
    write_embeddings,
)
from .synth import SynthConfig, generate
from .zeroshot import ZeroShotHead, zsl_logits, zsl_predict

CSV_HEADER = "method,n,k,episodes,mean_acc,std_err"


def _digest(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _manifest(args: argparse.Namespace, inputs: list[str]) -> dict:
    # output destinations do not affect results and are excluded so repeated
    # runs with different --out paths stay byte-identical
    skip = {"func", "out", "report"}
    config = {
        k: v for k, v in sorted(vars(args).items()) if k not in skip and v is not None
    }
    return {
        "command": args.command,
        "config": config,
        "input_digests": {str(p): _digest(p) for p in inputs},
        "tool_version": __version__,
        "base_seed": getattr(args, "seed", None),
    }


def _dump_json(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _load_labeled(path: str) -> SupportSet:
    emb, labels, vocab = read_embeddings(path)
    if labels is None:
        raise ValueError(f"{path}: expected a labeled embedding file")
    return SupportSet(embeddings=emb, labels=labels, vocab=vocab)


def _load_head(path: str, tau: float) -> ZeroShotHead:
    emb, labels, vocab = read_embeddings(path)
    if vocab is None:
        raise ValueError(f"{path}: text embeddings need a vocabulary (labeled file)")
    return ZeroShotHead(text_embeddings=emb, vocab=vocab, tau=tau)


def _train_cfg(args: argparse.Namespace) -> TrainConfig:
    return TrainConfig(
        epochs=args.epochs,
        learning_rate=args.lr,
        include_self=not args.no_self,
        seed=args.seed,
        phi_sign=args.phi_sign,
    )


def cmd_synth(args) -> int:
    cfg = SynthConfig(
        n_classes=args.classes,
        dim=args.dim,
        per_class=args.per_class,
        kappa=args.kappa,
        text_noise=args.text_noise,
        seed=args.seed,
    )
    dataset, text = generate(cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_embeddings(dataset.embeddings, out / "audio.treffemb",
                     labels=dataset.labels, vocab=dataset.vocab)
    # text rows are vocabulary-ordered; trivial labels carry the vocabulary
    write_embeddings(text, out / "text.treffemb",
                     labels=np.arange(cfg.n_classes), vocab=dataset.vocab)
    _dump_json(
        {"manifest": _manifest(args, []),
         "files": {"audio": str(out / "audio.treffemb"),
                   "text": str(out / "text.treffemb")}},
        str(out / "dataset.json"),
    )
    return 0


def cmd_zeroshot(args) -> int:
    dataset = _load_labeled(args.audio)
    head = _load_head(args.text, args.tau)
    if dataset.vocab != head.vocab:
        raise ValueError("audio and text vocabularies differ")
    predictions = zsl_predict(head, dataset.embeddings)
    accuracy = float(np.mean(predictions == dataset.labels))
    _dump_json(
        {
            "manifest": _manifest(args, [args.audio, args.text]),
            "predictions": [int(p) for p in predictions],
            "labels": [int(c) for c in dataset.labels],
            "accuracy": accuracy,
        },
        args.out,
    )
    return 0


def cmd_eval(args) -> int:
    dataset = _load_labeled(args.audio)
    emb, _, vocab = read_embeddings(args.text)
    if vocab is None or vocab != dataset.vocab:
        raise ValueError("text file must carry the same vocabulary as the audio file")
    summary = evaluate(
        args.method,
        dataset,
        emb,
        n=args.n_way,
        k=args.k_shot,
        q_per_class=args.queries_per_class,
        episode_count=args.episodes,
        base_seed=args.seed,
        tau=args.tau,
        train_cfg=_train_cfg(args),
        phi_sign=args.phi_sign,
    )
    _dump_json(
        {"manifest": _manifest(args, [args.audio, args.text]),
         "summary": summary.to_dict()},
        args.out,
    )
    return 0


def cmd_curve(args) -> int:
    dataset = _load_labeled(args.audio)
    emb, _, vocab = read_embeddings(args.text)
    if vocab is None or vocab != dataset.vocab:
        raise ValueError("text file must carry the same vocabulary as the audio file")
    shots = [int(s) for s in args.shots.split(",")]
    results = shot_curve(
        args.method,
        dataset,
        emb,
        n=args.n_way,
        shots=shots,
        q_per_class=args.queries_per_class,
        episode_count=args.episodes,
        base_seed=args.seed,
        tau=args.tau,
        train_cfg=_train_cfg(args),
        phi_sign=args.phi_sign,
    )
    lines = [CSV_HEADER] + [summary.csv_row() for _, summary in results]
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_finetune(args) -> int:
    support = _load_labeled(args.support)
    head = _load_head(args.text, args.tau)
    if support.vocab != head.vocab:
        raise ValueError("support and text vocabularies differ")
    report = treff_finetune(head, support, _train_cfg(args))
    save_params(report.final_params, args.out)
    _dump_json(
        {
            "manifest": _manifest(args, [args.support, args.text]),
            "loss_per_epoch": list(report.loss_per_epoch),
            "alpha": report.final_params.alpha,
            "params_file": args.out,
        },
        args.report,
    )
    return 0


def _add_train_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--epochs", type=int, default=20)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--no-self", action="store_true",
                   help="drop self-matches from the support-vs-support affinity")
    p.add_argument("--phi-sign", choices=PHI_SIGNS, default="corrected")
    p.add_argument("--tau", type=float, default=100.0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="treff",
        description="Few-shot adapter heads over frozen embeddings",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic clustered benchmark")
    p.add_argument("--classes", type=int, required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--per-class", type=int, required=True)
    p.add_argument("--kappa", type=float, default=4.0)
    p.add_argument("--text-noise", type=float, default=0.3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("zeroshot", help="zero-shot classification of a labeled file")
    p.add_argument("--audio", required=True)
    p.add_argument("--text", required=True)
    p.add_argument("--tau", type=float, default=100.0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_zeroshot)

    p = sub.add_parser("eval", help="episodic n-way k-shot evaluation")
    p.add_argument("--method", choices=METHODS, required=True)
    p.add_argument("--audio", required=True)
    p.add_argument("--text", required=True)
    p.add_argument("--n-way", type=int, required=True)
    p.add_argument("--k-shot", type=int, required=True)
    p.add_argument("--episodes", type=int, default=100)
    p.add_argument("--queries-per-class", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    _add_train_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("curve", help="accuracy vs shots, CSV output")
    p.add_argument("--method", choices=METHODS, required=True)
    p.add_argument("--audio", required=True)
    p.add_argument("--text", required=True)
    p.add_argument("--n-way", type=int, required=True)
    p.add_argument("--shots", default="1,2,4,8,16")
    p.add_argument("--episodes", type=int, default=100)
    p.add_argument("--queries-per-class", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    _add_train_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("finetune", help="fine-tune adapter weights on a support file")
    p.add_argument("--support", required=True)
    p.add_argument("--text", required=True)
    p.add_argument("--seed", type=int, default=0)
    _add_train_flags(p)
    p.add_argument("--out", required=True, help="output params file")
    p.add_argument("--report", help="fit report JSON path (default: stdout)")
    p.set_defaults(func=cmd_finetune)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, FloatingPointError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
