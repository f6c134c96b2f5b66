"""Command-line entry point wiring every module behind one `seatok` command.

Option resolution order is: command-line flag, then the matching key in the
TOML config section named after the subcommand (e.g. ``[vocab.extend]``),
then the built-in default. `--print-effective-config` dumps the resolved
values as JSON and exits without running. Exit codes: 0 success, 1 validation
error, 2 runtime error; every failure is one machine-parsable line on stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import shlex
import sys
from dataclasses import dataclass

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import corpus as corpus_mod
from . import extend as extend_mod
from . import langid as langid_mod
from . import metrics as metrics_mod
from . import multiturn as multiturn_mod
from . import packing as packing_mod
from . import preference as pref_mod
from . import sampling as sampling_mod
from . import vocab as vocab_mod

SEED_ENV_VAR = "SEATOK_SEED"

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2


class CliError(Exception):
    def __init__(self, code: str, message: str, exit_code: int = EXIT_VALIDATION):
        super().__init__(message)
        self.code = code
        self.exit_code = exit_code


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad usage; remap to the validation exit code.
    def error(self, message):
        raise CliError("E_USAGE", message)


@dataclass
class Opt:
    flag: str
    kind: str = "str"  # str,int,float,bool,list,map,path_in,path_out
    required: bool = False
    default: object = None
    choices: tuple = ()
    help: str = ""

    @property
    def dest(self) -> str:
        return self.flag.lstrip("-").replace("-", "_")


@dataclass
class Command:
    group: str
    name: str
    opts: list[Opt]
    handler: object
    needs_seed: bool = False
    help: str = ""


def _add_opt(parser: argparse.ArgumentParser, opt: Opt) -> None:
    kwargs = {"dest": opt.dest, "default": None, "help": opt.help}
    if opt.choices:
        kwargs["choices"] = opt.choices
    if opt.kind == "bool":
        kwargs["action"] = argparse.BooleanOptionalAction
    elif opt.kind == "int":
        kwargs["type"] = int
    elif opt.kind == "float":
        kwargs["type"] = float
    elif opt.kind == "map":
        kwargs["action"] = "append"
        kwargs["metavar"] = "KEY=VALUE"
    parser.add_argument(opt.flag, **kwargs)


def _coerce(opt: Opt, value, source: str):
    if value is None:
        return None
    if opt.kind == "list":
        if isinstance(value, str):
            return [v for v in value.split(",") if v]
        if isinstance(value, list) and all(isinstance(v, str) for v in value):
            return value
    elif opt.kind == "map":
        if isinstance(value, list):  # repeated KEY=VALUE flags
            out = {}
            for item in value:
                key, sep, val = item.partition("=")
                if not sep:
                    raise CliError("E_USAGE", f"{opt.flag} expects KEY=VALUE, got {item!r}")
                out[key] = val
            return out
        if isinstance(value, dict):
            return value
    elif opt.kind == "int":
        if isinstance(value, int) and not isinstance(value, bool):
            return value
    elif opt.kind == "float":
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            return float(value)
    elif opt.kind == "bool":
        if isinstance(value, bool):
            return value
    else:
        if isinstance(value, str):
            return value
        if opt.choices and value in opt.choices:
            return value
    raise CliError("E_CONFIG", f"bad value for {opt.dest} from {source}: {value!r}")


def _load_config(path: str) -> dict:
    try:
        with open(path, "rb") as f:
            return tomllib.load(f)
    except FileNotFoundError:
        raise CliError("E_PATH", f"config file not found: {path}")
    except tomllib.TOMLDecodeError as e:
        raise CliError("E_CONFIG", f"config parse error in {path}: {e}")


def _resolve(cmd: Command, args: argparse.Namespace) -> dict:
    section = {}
    if args.config:
        doc = _load_config(args.config)
        raw = doc.get(cmd.group, {}).get(cmd.name, {})
        if not isinstance(raw, dict):
            raise CliError("E_CONFIG", f"config section [{cmd.group}.{cmd.name}] must be a table")
        # config keys may use either the flag spelling (min-freq) or the
        # attribute spelling (min_freq)
        section = {key.replace("-", "_"): value for key, value in raw.items()}
        known = {opt.dest for opt in cmd.opts}
        unknown = [key for key in raw if key.replace("-", "_") not in known]
        if unknown:
            raise CliError(
                "E_CONFIG",
                f"unknown keys in [{cmd.group}.{cmd.name}]: {sorted(unknown)}",
            )
    eff = {}
    for opt in cmd.opts:
        flag_value = _coerce(opt, getattr(args, opt.dest), "flags")
        if flag_value is not None:
            eff[opt.dest] = flag_value
        elif opt.dest in section:
            eff[opt.dest] = _coerce(opt, section[opt.dest], "config")
        else:
            eff[opt.dest] = opt.default
    if cmd.needs_seed and eff.get("seed") is None:
        env = os.environ.get(SEED_ENV_VAR)
        if env is not None:
            try:
                eff["seed"] = int(env)
            except ValueError:
                raise CliError("E_CONFIG", f"{SEED_ENV_VAR} must be an integer, got {env!r}")
    for opt in cmd.opts:
        if opt.required and eff[opt.dest] is None:
            if opt.dest == "seed" and cmd.needs_seed:
                raise CliError(
                    "E_CONFIG",
                    f"seed required: pass --seed, set it in config, or set {SEED_ENV_VAR}",
                )
            raise CliError("E_USAGE", f"missing required option {opt.flag}")
        if opt.kind == "path_in" and eff[opt.dest] is not None:
            if not os.path.exists(eff[opt.dest]):
                raise CliError("E_PATH", f"input path does not exist: {eff[opt.dest]}")
    return eff


def _read_token_lines(path: str) -> list[str]:
    with open(path, "r", encoding="utf-8") as f:
        return [line.rstrip("\r\n") for line in f if line.rstrip("\r\n")]


# ---------------------------------------------------------------- vocab


def _cmd_vocab_build(eff: dict) -> None:
    texts = _read_token_lines(eff["tokens"])
    v = vocab_mod.build_vocabulary(
        texts, marker=eff["marker"], byte_fallback=eff["byte_fallback"],
        specials=eff["specials"],
    )
    vocab_mod.save_vocab(v, eff["out"])


def _cmd_vocab_import(eff: dict) -> None:
    v = vocab_mod.import_external_vocab(
        eff["input"], format=eff["format"], marker=eff["marker"],
        byte_fallback=eff["byte_fallback"],
    )
    vocab_mod.save_vocab(v, eff["out"])


def _cmd_vocab_extend(eff: dict) -> None:
    base = vocab_mod.load_vocab(eff["base"])
    target = vocab_mod.load_vocab(eff["target"])
    docs = corpus_mod.load_corpus(eff["corpus"])
    report = extend_mod.vocab_extend(base, target, docs, eff["min_freq"])
    vocab_mod.save_vocab(report.final_vocab, eff["out"])
    if eff["report"]:
        extend_mod.save_report(report, eff["report"])
    if eff["freq_out"]:
        extend_mod.save_frequencies(report.frequencies, eff["freq_out"])


def _cmd_vocab_inspect(eff: dict) -> None:
    v = vocab_mod.load_vocab(eff["vocab"])
    obj = {
        "size": len(v),
        "base_size": v.base_size,
        "marker": v.marker,
        "byte_fallback": v.byte_fallback_enabled,
        "specials": v.special_texts(),
        "extension": v.extension_texts(),
    }
    if eff["encode"] is not None:
        obj["ids"] = vocab_mod.tokenize(v, eff["encode"])
    if eff["decode"] is not None:
        try:
            ids = [int(x) for x in eff["decode"].split(",") if x]
        except ValueError:
            raise CliError("E_USAGE", f"--decode expects comma-separated ids, got {eff['decode']!r}")
        obj["text"] = vocab_mod.detokenize(v, ids)
    sys.stdout.write(json.dumps(obj, ensure_ascii=False, indent=2) + "\n")


# ---------------------------------------------------------------- metrics


def _cmd_metrics_ratio(eff: dict) -> None:
    subject = vocab_mod.load_vocab(eff["subject"])
    baseline = vocab_mod.load_vocab(eff["baseline"])
    parallel = metrics_mod.load_parallel_corpus(eff["parallel"])
    report = metrics_mod.compression_ratio(subject, baseline, parallel)
    metrics_mod.save_compression_report(report, eff["out"])
    sys.stdout.write(metrics_mod.format_table(report))
    if eff["table"]:
        with open(eff["table"], "w", encoding="utf-8", newline="\n") as f:
            f.write(metrics_mod.format_table(report))


def _cmd_metrics_stats(eff: dict) -> None:
    v = vocab_mod.load_vocab(eff["vocab"])
    docs = corpus_mod.load_corpus(eff["corpus"])
    stats = metrics_mod.corpus_token_stats(v, docs)
    with open(eff["out"], "w", encoding="utf-8", newline="\n") as f:
        json.dump(metrics_mod.stats_to_obj(stats), f, ensure_ascii=False, indent=2)
        f.write("\n")


# ---------------------------------------------------------------- data


def _load_seed_texts(path: str) -> dict[str, str]:
    seeds: dict[str, list[str]] = {}
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                seeds.setdefault(obj["lang"], []).append(obj["text"])
            except (json.JSONDecodeError, KeyError, TypeError) as e:
                raise CliError("E_FORMAT", f"{path}:{lineno}: bad seed line: {e}")
    return {lang: "\n".join(texts) for lang, texts in seeds.items()}


def _cmd_data_filter(eff: dict) -> None:
    sources = [s for s in ("langid_seeds", "langid_profiles", "langid_cmd") if eff[s]]
    if len(sources) != 1:
        raise CliError(
            "E_CONFIG",
            "exactly one of --langid-seeds, --langid-profiles, --langid-cmd is required",
        )
    docs = corpus_mod.load_corpus(eff["corpus"])
    external = None
    if eff["langid_seeds"]:
        profiles = langid_mod.train_profiles(_load_seed_texts(eff["langid_seeds"]))
        detector = lambda text: langid_mod.detect_language(text, profiles)
    elif eff["langid_profiles"]:
        profiles = langid_mod.load_profiles(eff["langid_profiles"])
        detector = lambda text: langid_mod.detect_language(text, profiles)
    else:
        external = langid_mod.SubprocessLanguageDetector(shlex.split(eff["langid_cmd"]))
        detector = external
    try:
        kept, discarded = langid_mod.filter_corpus(
            docs, set(eff["allowed"]), eff["threshold"], detector
        )
    finally:
        if external is not None:
            external.close()
    corpus_mod.save_corpus(kept, eff["out"])
    if eff["report"]:
        with open(eff["report"], "w", encoding="utf-8", newline="\n") as f:
            json.dump({"kept": len(kept), "discarded": discarded}, f, ensure_ascii=False, indent=2)
            f.write("\n")


def _cmd_data_sample(eff: dict) -> None:
    if not eff["stream"]:
        raise CliError("E_USAGE", "at least one --stream NAME=PATH is required")
    for path in eff["stream"].values():
        if not isinstance(path, str) or not os.path.exists(path):
            raise CliError("E_PATH", f"stream path does not exist: {path!r}")
    streams = {name: corpus_mod.load_corpus(path) for name, path in eff["stream"].items()}
    with open(eff["schedule"], "r", encoding="utf-8") as f:
        try:
            schedule = sampling_mod.schedule_from_obj(json.load(f))
        except json.JSONDecodeError as e:
            raise CliError("E_FORMAT", f"schedule parse error: {e}")
    docs = list(sampling_mod.sample_stream(
        streams, schedule, eff["seed"], on_exhausted=eff["on_exhausted"]
    ))
    corpus_mod.save_corpus(docs, eff["out"])


def _special_id(v: vocab_mod.Vocabulary, text: str, role: str) -> int:
    if text not in v.index:
        raise CliError("E_FORMAT", f"{role} token {text!r} not in vocabulary")
    return v.index[text]


def _cmd_data_pack(eff: dict) -> None:
    v = vocab_mod.load_vocab(eff["vocab"])
    docs = corpus_mod.load_corpus(eff["corpus"])
    sequences = packing_mod.pack_documents(
        docs, v, eff["max_len"],
        _special_id(v, eff["sep"], "separator"), _special_id(v, eff["pad"], "pad"),
    )
    packing_mod.save_packed_jsonl(sequences, eff["out"])
    if eff["binary"]:
        packing_mod.save_packed_binary(sequences, eff["binary"])


def _cmd_data_pack_hybrid(eff: dict) -> None:
    v = vocab_mod.load_vocab(eff["vocab"])
    pretrain = corpus_mod.load_corpus(eff["pretrain"])
    sft = corpus_mod.load_corpus(eff["sft"])
    sequences = packing_mod.pack_hybrid(
        pretrain, sft, eff["mix_ratio"], v, eff["max_len"], eff["seed"],
        _special_id(v, eff["sep"], "separator"), _special_id(v, eff["pad"], "pad"),
    )
    packing_mod.save_packed_jsonl(sequences, eff["out"])
    if eff["binary"]:
        packing_mod.save_packed_binary(sequences, eff["binary"])


def _parse_distribution(value) -> dict[int, float]:
    try:
        if isinstance(value, dict):
            return {int(k): float(p) for k, p in value.items()}
        out = {}
        for item in value.split(","):
            k, sep, p = item.partition("=")
            if not sep:
                raise ValueError(item)
            out[int(k)] = float(p)
        return out
    except (ValueError, TypeError):
        raise CliError("E_USAGE", f"bad distribution (want K=PROB,...): {value!r}")


def _cmd_data_join_multiturn(eff: dict) -> None:
    docs = corpus_mod.load_corpus(eff["sft"])
    bad = [d for d in docs if d.kind != corpus_mod.KIND_SFT]
    if bad:
        raise CliError("E_FORMAT", f"{len(bad)} non-sft documents in {eff['sft']}")
    conversations = multiturn_mod.join_multiturn(
        docs, _parse_distribution(eff["distribution"]), eff["seed"]
    )
    multiturn_mod.save_conversations(conversations, eff["out"])


# ---------------------------------------------------------------- pref


def _load_pairs(path: str) -> list[tuple[str, str, str]]:
    pairs = []
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                pairs.append((obj["prompt"], obj["first"], obj["second"]))
            except (json.JSONDecodeError, KeyError, TypeError) as e:
                raise CliError("E_FORMAT", f"{path}:{lineno}: bad pair line: {e}")
    return pairs


def _build_judge(spec: str, criteria: str, timeout: float):
    if spec == "longer-wins":
        return pref_mod.LongerWinsJudge(criteria)
    if spec == "lexicographic":
        return pref_mod.LexicographicJudge(criteria)
    if spec == "always-first":
        return pref_mod.AlwaysFirstJudge(criteria)
    if spec.startswith("subprocess:"):
        return pref_mod.SubprocessJudge(
            shlex.split(spec[len("subprocess:"):]), criteria, timeout
        )
    if spec.startswith(("http://", "https://")):
        return pref_mod.HttpJudge(spec, criteria, timeout)
    raise CliError(
        "E_USAGE",
        f"unknown judge {spec!r} (want longer-wins, lexicographic, always-first, "
        "subprocess:CMD, or an http(s) URL)",
    )


def _cmd_pref_generate(eff: dict) -> None:
    pairs = _load_pairs(eff["pairs"])
    judge = _build_judge(eff["judge"], eff["criteria"], eff["timeout"])
    try:
        records, dropped = pref_mod.build_preference_dataset(
            pairs, judge, seed=eff["seed"], max_workers=eff["workers"]
        )
    finally:
        if hasattr(judge, "close"):
            judge.close()
    pref_mod.save_records(records, eff["records"])
    if eff["dropped"]:
        pref_mod.save_dropped(dropped, eff["dropped"])


def _cmd_pref_export(eff: dict) -> None:
    records = pref_mod.load_records(eff["records"])
    pref_mod.export_dpo(records, eff["out"])


# ---------------------------------------------------------------- wiring

_MARKER_OPT = Opt("--marker", default=vocab_mod.DEFAULT_MARKER, help="word-boundary marker")

COMMANDS = [
    Command("vocab", "build", [
        Opt("--tokens", "path_in", required=True, help="plain token list, one per line"),
        Opt("--out", "path_out", required=True),
        _MARKER_OPT,
        Opt("--byte-fallback", "bool", default=True),
        Opt("--specials", "list", default=[], help="comma-separated special tokens"),
    ], _cmd_vocab_build, help="build a vocabulary from a token list"),
    Command("vocab", "import", [
        Opt("--input", "path_in", required=True),
        Opt("--out", "path_out", required=True),
        Opt("--format", choices=("plain_list", "tsv_with_scores"), default="plain_list"),
        _MARKER_OPT,
        Opt("--byte-fallback", "bool", default=False),
    ], _cmd_vocab_import, help="import an external token list"),
    Command("vocab", "extend", [
        Opt("--base", "path_in", required=True),
        Opt("--target", "path_in", required=True),
        Opt("--corpus", "path_in", required=True),
        Opt("--min-freq", "int", required=True),
        Opt("--out", "path_out", required=True),
        Opt("--report", "path_out", help="extension report JSON"),
        Opt("--freq-out", "path_out", help="candidate frequency TSV"),
    ], _cmd_vocab_extend, help="extend a base vocabulary against a target"),
    Command("vocab", "inspect", [
        Opt("--vocab", "path_in", required=True),
        Opt("--encode", help="text to encode; ids land in the JSON output"),
        Opt("--decode", help="comma-separated ids to decode"),
    ], _cmd_vocab_inspect, help="summarize a vocabulary, optionally encode/decode"),
    Command("metrics", "ratio", [
        Opt("--subject", "path_in", required=True),
        Opt("--baseline", "path_in", required=True),
        Opt("--parallel", "path_in", required=True),
        Opt("--out", "path_out", required=True),
        Opt("--table", "path_out", help="also write an aligned text table"),
    ], _cmd_metrics_ratio, help="per-language compression ratios vs a baseline"),
    Command("metrics", "stats", [
        Opt("--vocab", "path_in", required=True),
        Opt("--corpus", "path_in", required=True),
        Opt("--out", "path_out", required=True),
    ], _cmd_metrics_stats, help="per-language token statistics"),
    Command("data", "filter", [
        Opt("--corpus", "path_in", required=True),
        Opt("--out", "path_out", required=True),
        Opt("--allowed", "list", required=True, help="language codes to keep"),
        Opt("--threshold", "float", default=0.0),
        Opt("--langid-seeds", "path_in", help="JSONL {lang,text} to train the detector"),
        Opt("--langid-profiles", "path_in", help="pre-trained profile JSON"),
        Opt("--langid-cmd", help="external detector command line"),
        Opt("--report", "path_out", help="discard-count JSON"),
    ], _cmd_data_filter, help="language-identification corpus filter"),
    Command("data", "sample", [
        Opt("--stream", "map", required=True, help="NAME=PATH, repeatable"),
        Opt("--schedule", "path_in", required=True, help="JSON {phases:[{weights,length}]}"),
        Opt("--seed", "int", required=True),
        Opt("--on-exhausted", choices=("renormalize", "error"), default="renormalize"),
        Opt("--out", "path_out", required=True),
    ], _cmd_data_sample, needs_seed=True, help="weighted multi-stream sampling"),
    Command("data", "pack", [
        Opt("--corpus", "path_in", required=True),
        Opt("--vocab", "path_in", required=True),
        Opt("--max-len", "int", required=True),
        Opt("--sep", default="<sep>", help="separator special token text"),
        Opt("--pad", default="<pad>", help="pad special token text"),
        Opt("--out", "path_out", required=True),
        Opt("--binary", "path_out", help="also write flat little-endian u32 ids"),
    ], _cmd_data_pack, help="pack documents into fixed-length sequences"),
    Command("data", "pack-hybrid", [
        Opt("--pretrain", "path_in", required=True),
        Opt("--sft", "path_in", required=True),
        Opt("--mix-ratio", "float", required=True),
        Opt("--vocab", "path_in", required=True),
        Opt("--max-len", "int", required=True),
        Opt("--sep", default="<sep>"),
        Opt("--pad", default="<pad>"),
        Opt("--seed", "int", required=True),
        Opt("--out", "path_out", required=True),
        Opt("--binary", "path_out"),
    ], _cmd_data_pack_hybrid, needs_seed=True, help="pack a pretrain/sft interleave"),
    Command("data", "join-multiturn", [
        Opt("--sft", "path_in", required=True),
        Opt("--distribution", required=True, help="K=PROB,... turn-count distribution"),
        Opt("--seed", "int", required=True),
        Opt("--out", "path_out", required=True),
    ], _cmd_data_join_multiturn, needs_seed=True, help="join single-turn sft into conversations"),
    Command("pref", "generate", [
        Opt("--pairs", "path_in", required=True, help="JSONL {prompt,first,second}"),
        Opt("--judge", required=True,
            help="longer-wins | lexicographic | always-first | subprocess:CMD | URL"),
        Opt("--criteria", default=pref_mod.DEFAULT_CRITERIA),
        Opt("--timeout", "float", default=30.0),
        Opt("--workers", "int", default=1),
        Opt("--seed", "int"),
        Opt("--records", "path_out", required=True, help="full record JSONL"),
        Opt("--dropped", "path_out", help="dropped-pair JSONL with reasons"),
    ], _cmd_pref_generate, help="build order-consistent preference records"),
    Command("pref", "export", [
        Opt("--records", "path_in", required=True),
        Opt("--out", "path_out", required=True),
    ], _cmd_pref_export, help="export records as DPO JSONL"),
]


def _build_parser() -> _Parser:
    parser = _Parser(prog="seatok", description=__doc__.splitlines()[0])
    groups = parser.add_subparsers(dest="group", metavar="GROUP")
    group_parsers: dict[str, argparse._SubParsersAction] = {}
    for cmd in COMMANDS:
        if cmd.group not in group_parsers:
            gp = groups.add_parser(cmd.group)  # inherits the _Parser class
            group_parsers[cmd.group] = gp.add_subparsers(dest="command", metavar="COMMAND")
        sp = group_parsers[cmd.group].add_parser(cmd.name, help=cmd.help)
        sp.add_argument("--config", default=None, help="TOML config file")
        sp.add_argument("--print-effective-config", action="store_true")
        for opt in cmd.opts:
            _add_opt(sp, opt)
        sp.set_defaults(_cmd=cmd)
    return parser


def run(argv) -> int:
    """Execute one subcommand; returns the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        cmd = getattr(args, "_cmd", None)
        if cmd is None:
            raise CliError("E_USAGE", "a GROUP and COMMAND are required (see --help)")
        eff = _resolve(cmd, args)
        if args.print_effective_config:
            dump = {"command": f"{cmd.group} {cmd.name}"}
            dump.update({opt.dest: eff[opt.dest] for opt in cmd.opts})
            sys.stdout.write(json.dumps(dump, ensure_ascii=False, indent=2) + "\n")
            return EXIT_OK
        cmd.handler(eff)
        return EXIT_OK
    except CliError as e:
        sys.stderr.write(f"error: {e.code}: {e}\n")
        return e.exit_code
    except (vocab_mod.VocabError, extend_mod.ExtendError, corpus_mod.CorpusError,
            metrics_mod.MetricsError, langid_mod.LangIdError, sampling_mod.SampleError,
            packing_mod.PackError, multiturn_mod.MultiturnError) as e:
        sys.stderr.write(f"error: E_FORMAT: {e}\n")
        return EXIT_VALIDATION
    except FileNotFoundError as e:
        sys.stderr.write(f"error: E_PATH: {e}\n")
        return EXIT_VALIDATION
    except pref_mod.JudgeError as e:
        sys.stderr.write(f"error: E_RUNTIME: {e}\n")
        return EXIT_RUNTIME
    except SystemExit as e:  # argparse --help
        return int(e.code or 0)
    except Exception as e:  # noqa: BLE001 - last-resort runtime mapping
        sys.stderr.write(f"error: E_RUNTIME: {type(e).__name__}: {e}\n")
        return EXIT_RUNTIME


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
