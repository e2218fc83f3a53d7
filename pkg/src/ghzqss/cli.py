"""Command-line front end.

Three subcommands: ``run`` executes a full session and writes transcript and
report files, ``analyze`` prints the exact single-round joint distribution
and security numbers for one variant/attack pair, ``table1`` prints and
verifies the eight-row recovery table for three parties.

Exit codes: 0 success, 1 recovery-table mismatch, 2 usage or validation
error, 3 register capacity exceeded.  Nothing is written to stderr on
success.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .attacks import (
    AttackModel,
    conditional_detection_rate,
    eve_mutual_information,
    exact_round_analysis,
)
from .protocol import StateVariant, recover_secret
from .session import (
    SessionConfig,
    default_output_dir,
    run_session,
    write_outputs,
)
from .statevec import RegisterCapacityError

_ATTACK_NAMES = {
    "none": "none",
    "intercept-resend": "intercept_resend_bell",
    "collective-cnot": "collective_cnot",
    "collective-h-cnot": "collective_h_cnot",
}

# the full eight-row recovery table for three parties:
# (sender bit, receiver signs) -> secret, sign + encoding bit 0
RECOVERY_TABLE_3 = (
    (0, (0, 0), 0),
    (0, (0, 1), 1),
    (0, (1, 0), 1),
    (0, (1, 1), 0),
    (1, (0, 0), 1),
    (1, (0, 1), 0),
    (1, (1, 0), 0),
    (1, (1, 1), 1),
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ghzqss",
        description="Simulate GHZ-carried (n,n)-threshold quantum secret sharing",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a full session and write transcript/report")
    run_p.add_argument("--parties", type=int, default=3, help="total party count n (>= 3)")
    run_p.add_argument("--rounds", type=int, default=200, help="number of rounds")
    run_p.add_argument("--check-fraction", type=float, default=0.5)
    run_p.add_argument("--attack", choices=sorted(_ATTACK_NAMES), default="none")
    run_p.add_argument("--target-receiver", type=int, default=None)
    run_p.add_argument("--seed", type=int, default=0)
    run_p.add_argument("--message-file", help="file holding the 0/1 message string")
    run_p.add_argument(
        "--random-message", type=int, metavar="BITS", help="send BITS random message bits"
    )
    run_p.add_argument("--mode", choices=("sample", "exact"), default="sample")
    run_p.add_argument("--abort-threshold", type=float, default=0.0)
    run_p.add_argument(
        "--all-subsets",
        action="store_true",
        help="draw variants from all receiver subsets instead of the standard n+1",
    )
    run_p.add_argument("--out", default=None, help="output directory")

    an_p = sub.add_parser("analyze", help="exact single-round analysis")
    an_p.add_argument("--parties", type=int, default=3)
    an_p.add_argument("--variant", default="psi1", help="variant name, e.g. psi2 or Psi4")
    an_p.add_argument(
        "--hadamard-positions",
        default=None,
        help="comma-separated receiver positions, overrides --variant",
    )
    an_p.add_argument("--payload", type=int, choices=(0, 1), default=None)
    an_p.add_argument("--attack", choices=sorted(_ATTACK_NAMES), default="none")
    an_p.add_argument("--target-receiver", type=int, default=None)
    an_p.add_argument(
        "--condition-bell",
        type=int,
        choices=(0, 1, 2, 3),
        default=None,
        help="condition the detection rate on the attacker's Bell outcome",
    )

    sub.add_parser("table1", help="print and verify the three-party recovery table")
    return parser


def _parse_variant(args) -> StateVariant:
    if args.hadamard_positions is not None:
        text = args.hadamard_positions.strip()
        positions = [int(p) for p in text.split(",") if p.strip()] if text else []
        return StateVariant.from_positions(args.parties, positions)
    name = args.variant.strip().lower()
    if not name.startswith("psi"):
        raise ValueError(f"variant name {args.variant!r} should look like psi2")
    try:
        index = int(name[3:])
    except ValueError:
        raise ValueError(f"variant name {args.variant!r} should look like psi2") from None
    return StateVariant.from_index(args.parties, index)


def cmd_run(args) -> int:
    if args.message_file is not None and args.random_message is not None:
        raise ValueError("give at most one of --message-file and --random-message")
    if args.message_file is not None:
        with open(args.message_file) as fh:
            message = "".join(fh.read().split())
    elif args.random_message is not None:
        if args.random_message < 0:
            raise ValueError("--random-message must be non-negative")
        rng = np.random.default_rng(np.random.SeedSequence((args.seed,)))
        message = "".join(str(b) for b in rng.integers(0, 2, size=args.random_message))
    else:
        message = ""
    config = SessionConfig(
        n=args.parties,
        rounds=args.rounds,
        check_fraction=args.check_fraction,
        attack=AttackModel(_ATTACK_NAMES[args.attack], args.target_receiver),
        seed=args.seed,
        mode=args.mode,
        abort_threshold=args.abort_threshold,
        message=message,
        all_subsets=args.all_subsets,
    )
    result = run_session(config)
    out_dir = args.out if args.out is not None else default_output_dir()
    write_outputs(result, out_dir)
    report = result.report
    ber = "n/a" if report.message_bit_error_rate is None else f"{report.message_bit_error_rate:.6f}"
    print(
        f"detected={str(report.detected).lower()} "
        f"check_error_rate={report.check_error_rate:.6f} message_ber={ber}"
    )
    return 0


def _print_table(n: int, variant: StateVariant, payload: int, attack: AttackModel) -> None:
    table = exact_round_analysis(n, variant, payload, attack)
    print(f"payload {payload} joint distribution:")
    for (alice_a, alice_big_a, signs, eve), p in sorted(
        table.items(), key=lambda kv: (kv[0][0], kv[0][1], kv[0][2], str(kv[0][3]))
    ):
        if p <= 1e-12:
            continue
        sign_text = "".join("-" if s else "+" for s in signs)
        eve_text = "-" if eve is None else str(eve)
        print(
            f"  alice_a={alice_a} alice_A={alice_big_a} signs={sign_text} "
            f"eve={eve_text}  p={p:.8f}"
        )


def cmd_analyze(args) -> int:
    variant = _parse_variant(args)
    attack = AttackModel(_ATTACK_NAMES[args.attack], args.target_receiver)
    positions = ",".join(str(p) for p in sorted(variant.hadamard_positions)) or "none"
    target = f" target={attack.resolve_target(args.parties)}" if attack.active else ""
    print(
        f"variant={variant.name} (hadamard positions: {positions}) "
        f"parties={args.parties} attack={attack.kind}{target}"
    )
    payloads = (args.payload,) if args.payload is not None else (0, 1)
    for payload in payloads:
        _print_table(args.parties, variant, payload, attack)
    rate = conditional_detection_rate(attack, variant, args.condition_bell)
    if args.condition_bell is None:
        print(f"detection_rate = {rate:.8f}")
    else:
        print(f"detection_rate = {rate:.8f}  (conditioned on Bell outcome {args.condition_bell})")
    info = eve_mutual_information(attack, variant)
    print(f"eve_mutual_information = {info:.8f} bits")
    return 0


def cmd_table1(_args) -> int:
    print("alice_a  receiver_2  receiver_3  secret")
    ok = True
    for alice_a, signs, expected in RECOVERY_TABLE_3:
        got = recover_secret(alice_a, signs)
        s2, s3 = ("-" if s else "+" for s in signs)
        print(f"{alice_a}        {s2}           {s3}           {got}")
        if got != expected:
            ok = False
            print(
                f"mismatch: alice_a={alice_a} signs={signs} expected {expected} got {got}",
                file=sys.stderr,
            )
    return 0 if ok else 1


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(args)
        if args.command == "analyze":
            return cmd_analyze(args)
        return cmd_table1(args)
    except RegisterCapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
