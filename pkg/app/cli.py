"""
Command-line interface.

    python app/cli.py descriptors --input corpus.smi --output labels.csv
    python app/cli.py pretrain --generate 2000 --preset T2_F8 --seed 0
    python app/cli.py finetune --model runs/pretrain/model.chnt \\
        --toy-task hydroxyl --generate 600 --seed 0

Exit codes: 0 success, 1 usage, 2 data error, 3 numeric or model error.
"""

from __future__ import annotations

import argparse
import json
import sys
from collections.abc import Callable, Sequence
from pathlib import Path
from typing import Any, NoReturn

import numpy as np
import pandas as pd
from chem.canon import canonicalize
from config import (
    ConfigVars,
    ExperimentConfig,
    TrainConfig,
    load_experiment_config,
    load_model_presets,
    merge_overrides,
)
from debug_tools import Debugger
from encoding.text import Vocab, build_vocab, encode
from env import EnvVarsLoader
from errors import ChemNetError
from harness.corpus import generate_corpus, read_corpus, write_corpus
from harness.dataset import (
    Dataset,
    DatasetSchema,
    TaskKind,
    build_dataset,
    load_dataset,
    prepare_molecule,
    write_duplicate_audit,
    write_rejects,
)
from harness.experiments import (
    MODEL_FILE,
    compare_initializations,
    evaluate_model,
    finetune,
    freeze_sweep,
    pretrain,
)
from harness.manifest import (
    RunManifest,
    file_sha256,
    make_run_dir,
    smiles_sha256,
)
from harness.report import learning_curves, summarize_runs
from harness.splits import make_split
from harness.toy_tasks import TOY_TASKS, make_toy_dataset
from imaging.dump import write_tensor_dump
from imaging.layout import layout_2d
from imaging.raster import ImageScheme, augmented_sample
from labels.descriptors import (
    compute_descriptors,
    export_label_matrix,
    label_matrix,
    resolve_names,
)
from labels.normalization import fit_normalizer
from log_tools import Logger
from pydantic import ValidationError
from tensornet.serialize import load_model
from utils.common import save_table

app_logger = Logger.get_app_logger()

USAGE_EXIT = 1

TRAIN_FLAGS: dict[str, type] = {
    "learning_rate": float,
    "rho": float,
    "epsilon": float,
    "batch_size": int,
    "max_epochs": int,
    "patience": int,
}
EXPERIMENT_FLAGS: dict[str, type] = {
    "image_size": int,
    "resolution": float,
    "T": int,
    "F": int,
    "hidden": int,
    "sequence_length": int,
    "test_fraction": float,
    "folds": int,
    "workers": int,
}


class UsageError(Exception):
    """Arguments that parse but do not make a valid request."""

    exit_code = USAGE_EXIT


class UsageParser(argparse.ArgumentParser):
    """ArgumentParser that exits with code 1 on usage errors."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(USAGE_EXIT, f"{self.prog}: error: {message}\n")


# arguments ---------------------------------------------------------------


def _add_smiles_input(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--smiles", help="a single SMILES string")
    group.add_argument("--input", type=Path, help="a .smi file, one SMILES per line")


def _add_experiment_flags(parser: argparse.ArgumentParser, seeded: bool = True) -> None:
    parser.add_argument("--config", type=Path, help="JSON experiment config file")
    parser.add_argument("--preset", help="architecture preset from models.json")
    parser.add_argument(
        "--modality", choices=["image-std", "image-engd", "text"], default=None
    )
    parser.add_argument(
        "--descriptors",
        help="descriptor count (first k) or comma-separated registry names",
    )
    for name, kind in {**EXPERIMENT_FLAGS, **TRAIN_FLAGS}.items():
        flag = name if name in ("T", "F") else name.replace("_", "-")
        parser.add_argument(f"--{flag}", dest=name, type=kind, default=None)
    parser.add_argument("--precision", choices=["float32", "float64"], default=None)
    parser.add_argument("--no-stratify", action="store_true")
    if seeded:
        parser.add_argument("--seed", type=int, required=True)
    parser.add_argument("--out", type=Path, help="run directory")


def _add_dataset_flags(parser: argparse.ArgumentParser) -> None:
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--dataset", type=Path, help="delimited file with a header")
    source.add_argument("--toy-task", choices=sorted(TOY_TASKS))
    parser.add_argument("--smiles-column", default="smiles")
    parser.add_argument("--label-columns", default="", help="comma-separated")
    parser.add_argument("--id-column", default=None)
    parser.add_argument(
        "--task", choices=[t.value for t in TaskKind], default="classification"
    )
    corpus = parser.add_mutually_exclusive_group()
    corpus.add_argument("--corpus", type=Path, help="SMILES file for --toy-task")
    corpus.add_argument("--generate", type=int, help="generate N molecules")
    parser.add_argument("--corpus-seed", type=int, default=0)


def build_parser() -> UsageParser:
    parser = UsageParser(prog="chemnet", description="ChemNet toolkit")
    parser.add_argument("-v", "--verbose", action="store_true")
    parser.add_argument("-q", "--quiet", action="store_true")
    parser.add_argument("--attach-debugger", action="store_true")
    parser.add_argument("--wait-for-client", action="store_true")
    commands = parser.add_subparsers(
        dest="command", required=True, parser_class=UsageParser
    )

    p = commands.add_parser("descriptors", help="SMILES file -> label matrix CSV")
    _add_smiles_input(p)
    p.add_argument("--output", type=Path, required=True)
    p.add_argument("--descriptors", default=None)
    p.add_argument("--stats", type=Path, help="also fit and write NormStats JSON")
    p.add_argument("--rejects", type=Path, help="write rejected SMILES here")

    p = commands.add_parser("render", help="SMILES -> image tensor dump")
    p.add_argument("--smiles", required=True)
    p.add_argument("--scheme", choices=["std", "engd"], default="engd")
    p.add_argument("--image-size", type=int, default=None)
    p.add_argument("--resolution", type=float, default=None)
    p.add_argument("--rotate-seed", type=int, default=None)
    p.add_argument("--output", type=Path, required=True)

    p = commands.add_parser("encode", help="SMILES -> one-hot tensor dump")
    p.add_argument("--smiles", required=True)
    p.add_argument("--vocab", type=Path, help="vocabulary file; built when absent")
    p.add_argument("--length", type=int, default=None)
    p.add_argument("--output", type=Path, required=True)

    p = commands.add_parser("corpus", help="write a generated pre-training corpus")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", type=Path, required=True)

    p = commands.add_parser("split", help="write a cross-validation split plan")
    _add_dataset_flags(p)
    p.add_argument("--test-fraction", type=float, default=1 / 6)
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--no-stratify", action="store_true")
    p.add_argument("--output", type=Path, required=True)

    p = commands.add_parser("pretrain", help="train on computed descriptors")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--corpus", type=Path)
    source.add_argument("--generate", type=int)
    p.add_argument("--corpus-seed", type=int, default=0)
    _add_experiment_flags(p)

    p = commands.add_parser("finetune", help="cross-validated fine-tuning")
    p.add_argument("--model", type=Path, help="pretrained model; random init if unset")
    p.add_argument("--freeze-k", type=int, default=None)
    _add_dataset_flags(p)
    _add_experiment_flags(p)

    p = commands.add_parser("sweep", help="fine-tune for every freeze_k")
    p.add_argument("--model", type=Path, required=True)
    _add_dataset_flags(p)
    _add_experiment_flags(p)

    p = commands.add_parser("compare", help="pretrained vs random initialization")
    p.add_argument("--model", type=Path, required=True)
    p.add_argument("--seeds", type=int, nargs="+", required=True)
    p.add_argument("--freeze-k", type=int, default=None)
    _add_dataset_flags(p)
    _add_experiment_flags(p, seeded=False)

    p = commands.add_parser("evaluate", help="metric of a model on a dataset")
    p.add_argument("--model", type=Path, required=True)
    _add_dataset_flags(p)

    p = commands.add_parser("report", help="plot-ready tables from run directories")
    p.add_argument("--runs", type=Path, nargs="+", required=True)
    p.add_argument("--output", type=Path, required=True)
    p.add_argument("--curves", type=Path, help="also write stacked learning curves")
    return parser


# helpers -----------------------------------------------------------------


def _descriptor_selection(text: str | None) -> list[str] | None:
    if text is None:
        return None
    if text.strip().isdigit():
        return list(resolve_names(int(text)))
    return list(resolve_names([name.strip() for name in text.split(",")]))


def experiment_config(
    args: argparse.Namespace, defaults: TrainConfig
) -> ExperimentConfig:
    """Config file, then preset, then command-line flags."""
    try:
        return _layer_config(args, defaults)
    except (ValidationError, json.JSONDecodeError) as err:
        raise UsageError(f"invalid experiment settings: {err}") from err


def _layer_config(args: argparse.Namespace, defaults: TrainConfig) -> ExperimentConfig:
    base = (
        load_experiment_config(args.config)
        if args.config is not None
        else ExperimentConfig(train=defaults)
    )
    if args.preset is not None:
        presets = load_model_presets()
        if args.preset not in presets:
            raise UsageError(f"unknown preset {args.preset!r}; have {sorted(presets)}")
        base = base.apply_preset(presets[args.preset])
    overrides: dict[str, Any] = {
        name: getattr(args, name) for name in {**EXPERIMENT_FLAGS, **TRAIN_FLAGS}
    }
    overrides.update(
        modality=args.modality,
        precision=args.precision,
        seed=getattr(args, "seed", None),
        descriptors=_descriptor_selection(args.descriptors),
        stratify=False if args.no_stratify else None,
    )
    return merge_overrides(base, overrides)


def _smiles_inputs(args: argparse.Namespace) -> list[str]:
    return [args.smiles] if args.smiles is not None else read_corpus(args.input)


def _corpus(args: argparse.Namespace) -> list[str]:
    if args.corpus is not None:
        return read_corpus(args.corpus)
    if args.generate is not None:
        return generate_corpus(args.generate, seed=args.corpus_seed)
    raise UsageError("a toy task needs --corpus or --generate")


def load_cli_dataset(args: argparse.Namespace) -> Dataset:
    if args.toy_task is not None:
        return make_toy_dataset(_corpus(args), args.toy_task)
    schema = DatasetSchema(
        smiles_column=args.smiles_column,
        label_columns=[c.strip() for c in args.label_columns.split(",") if c.strip()],
        id_column=args.id_column,
        task=TaskKind(args.task),
    )
    if not schema.label_columns:
        raise UsageError("--label-columns is required with --dataset")
    return load_dataset(args.dataset, schema)


def _run_dir(args: argparse.Namespace, command: str) -> Path:
    output_dir = (
        EnvVarsLoader.load_env()["CHEMNET_OUTPUT_DIR"] or ConfigVars().OUTPUT_DIR
    )
    return make_run_dir(output_dir, command, args.out)


def _write_manifest(
    run_dir: Path,
    command: str,
    config: ExperimentConfig,
    seeds: Sequence[int],
    smiles: Sequence[str],
    reject_counts: dict[str, int],
    results: dict[str, Any],
) -> None:
    RunManifest(
        command=command,
        config=config.model_dump(),
        seeds=list(seeds),
        corpus_sha256=smiles_sha256(smiles),
        reject_counts=reject_counts,
        results=results,
    ).save(run_dir)


# commands ----------------------------------------------------------------


def cmd_descriptors(args: argparse.Namespace) -> int:
    names = resolve_names(_descriptor_selection(args.descriptors))
    smiles = _smiles_inputs(args)
    dataset = build_dataset(
        smiles,
        np.zeros((len(smiles), 0)),
        TaskKind.REGRESSION,
        [],
        validate=lambda mol, _: compute_descriptors(mol, names),
    )
    matrix = label_matrix(dataset.mols, names)
    export_label_matrix(args.output, dataset.canonical, matrix, names)
    if args.stats is not None:
        fit_normalizer(matrix, list(names)).save(args.stats)
    if args.rejects is not None:
        write_rejects(args.rejects, dataset.rejects)
    return 0


def cmd_render(args: argparse.Namespace) -> int:
    mol, _ = prepare_molecule(args.smiles)
    layout = layout_2d(mol, args.image_size, args.resolution)
    rng = None
    if args.rotate_seed is not None:
        rng = np.random.default_rng(args.rotate_seed)
    image = augmented_sample(
        mol, ImageScheme(args.scheme), rng, args.image_size, args.resolution, layout
    )
    write_tensor_dump(args.output, image.pixels)
    return 0


def cmd_encode(args: argparse.Namespace) -> int:
    canonical = canonicalize(args.smiles)
    vocab = (
        Vocab.load(args.vocab) if args.vocab is not None else build_vocab([canonical])
    )
    write_tensor_dump(args.output, encode(canonical, vocab, args.length))
    return 0


def cmd_corpus(args: argparse.Namespace) -> int:
    write_corpus(args.output, generate_corpus(args.n, seed=args.seed, progress=True))
    return 0


def cmd_split(args: argparse.Namespace) -> int:
    if not 0 < args.test_fraction < 1 or args.folds < 2:
        raise UsageError("--test-fraction must lie in (0, 1) and --folds be >= 2")
    dataset = load_cli_dataset(args)
    plan = make_split(
        dataset, args.test_fraction, args.folds, args.seed, not args.no_stratify
    )
    args.output.parent.mkdir(parents=True, exist_ok=True)
    args.output.write_text(plan.model_dump_json(indent=2), encoding="utf-8")
    if dataset.duplicates():
        write_duplicate_audit(args.output.with_suffix(".duplicates.csv"), dataset)
    return 0


def cmd_pretrain(args: argparse.Namespace) -> int:
    config = experiment_config(args, TrainConfig.pretrain_defaults())
    smiles = (
        read_corpus(args.corpus)
        if args.corpus is not None
        else generate_corpus(args.generate, seed=args.corpus_seed, progress=True)
    )
    run_dir = _run_dir(args, "pretrain")
    result = pretrain(smiles, config, run_dir=run_dir)
    _write_manifest(
        run_dir,
        "pretrain",
        config,
        [config.train.seed],
        smiles,
        _reject_counts(result.rejects),
        {
            "val_loss": result.val_loss,
            "untrained_val_loss": result.baseline_val_loss,
            "best_epoch": result.history.best_epoch,
            "molecules": len(result.smiles),
            "model_sha256": file_sha256(run_dir / MODEL_FILE),
        },
    )
    print(f"{run_dir}\tval_loss={result.val_loss:.6g}")
    return 0


def _reject_counts(rejects: Sequence[Any]) -> dict[str, int]:
    counts: dict[str, int] = {}
    for reject in rejects:
        counts[reject.reason] = counts.get(reject.reason, 0) + 1
    return dict(sorted(counts.items()))


def _pretrained_config(
    args: argparse.Namespace, model_path: Path | None
) -> tuple[ExperimentConfig, Any]:
    config = experiment_config(args, TrainConfig.finetune_defaults())
    if model_path is None:
        return config, None
    model = load_model(model_path)
    if args.modality is None and "modality" in model.metadata:
        config = config.model_copy(update={"modality": model.metadata["modality"]})
    return config, model


def cmd_finetune(args: argparse.Namespace) -> int:
    config, model = _pretrained_config(args, args.model)
    dataset = load_cli_dataset(args)
    run_dir = _run_dir(args, "finetune")
    result = finetune(
        dataset, config, model=model, freeze_k=args.freeze_k, run_dir=run_dir
    )
    _write_manifest(
        run_dir,
        "finetune",
        config,
        [config.train.seed],
        dataset.smiles,
        _reject_counts(result.rejects),
        {
            "metric": result.metrics.metric,
            "mean": result.metrics.mean,
            "pretrained_sha256": (
                file_sha256(args.model) if args.model is not None else None
            ),
            "fold_sha256": [
                file_sha256(run_dir / f"fold_{index}.chnt")
                for index in range(len(result.models))
            ],
        },
    )
    print(f"{run_dir}\t{result.metrics.metric}={result.metrics.mean:.4f}")
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    config, model = _pretrained_config(args, args.model)
    dataset = load_cli_dataset(args)
    run_dir = _run_dir(args, "sweep")
    table = freeze_sweep(model, dataset, config)
    save_table(table, run_dir / "sweep.csv")
    _write_manifest(
        run_dir,
        "sweep",
        config,
        [config.train.seed],
        dataset.smiles,
        dataset.reject_counts(),
        {"rows": len(table)},
    )
    print(table.to_string(index=False))
    return 0


def cmd_compare(args: argparse.Namespace) -> int:
    config, model = _pretrained_config(args, args.model)
    dataset = load_cli_dataset(args)
    run_dir = _run_dir(args, "compare")
    table, summary = compare_initializations(
        model, dataset, config, args.seeds, freeze_k=args.freeze_k
    )
    save_table(table, run_dir / "compare.csv")
    save_table(summary, run_dir / "compare_summary.csv")
    _write_manifest(
        run_dir,
        "compare",
        config,
        args.seeds,
        dataset.smiles,
        dataset.reject_counts(),
        {"rows": len(table)},
    )
    print(summary.to_string(index=False))
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    dataset = load_cli_dataset(args)
    value = evaluate_model(model, dataset)
    print(json.dumps({"metric": value, "records": len(dataset)}))
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    save_table(summarize_runs(args.runs), args.output)
    if args.curves is not None:
        save_table(learning_curves(args.runs), args.curves)
    return 0


COMMANDS: dict[str, Callable[[argparse.Namespace], int]] = {
    "descriptors": cmd_descriptors,
    "render": cmd_render,
    "encode": cmd_encode,
    "corpus": cmd_corpus,
    "split": cmd_split,
    "pretrain": cmd_pretrain,
    "finetune": cmd_finetune,
    "sweep": cmd_sweep,
    "compare": cmd_compare,
    "evaluate": cmd_evaluate,
    "report": cmd_report,
}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.verbose:
        Logger.set_level("DEBUG")
    elif args.quiet:
        Logger.set_level("WARNING")
    else:
        level = EnvVarsLoader.load_env()["CHEMNET_LOG_LEVEL"]
        if level is not None:
            Logger.set_level(level.upper())

    config = ConfigVars()
    Debugger.setup_debugpy(
        app_logger,
        flag=args.attach_debugger or config.ATTACH_DEBUGGER,
        wait_for_client=args.wait_for_client or config.WAIT_FOR_CLIENT,
        host=config.DEBUGPY_HOST,
        port=config.DEFAULT_DEBUG_PORT,
    )

    try:
        return COMMANDS[args.command](args)
    except ChemNetError as err:
        app_logger.error("%s: %s", err.reason, err)
        return err.exit_code
    except UsageError as err:
        app_logger.error("usage: %s", err)
        return err.exit_code


if __name__ == "__main__":
    sys.exit(main())
