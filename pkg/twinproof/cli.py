"""
Batch command-line surface.

Every command prints a JSON report (or a `--text` summary) to stdout and
exits with 0 on success or acceptance, 1 on rejection or a failed check,
2 on malformed input and 3 when a size cap is hit or another internal check
fails. Operators are capped at 12 nodes, the coloring family attack at 8.
"""

import argparse
import json
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Sequence

from twinproof.adversary import attack_graph, dump_attack_result
from twinproof.certificates import (
    certificate_from_pair, classical_verify, dump_certificate, load_certificate,
    precision_budget
)
from twinproof.circuits import VerifierParams, compile_verifier, dump_circuit, embed_dims
from twinproof.config import limits, defaults
from twinproof.errors import TwinProofError, InputError, SizeCapError, CertificateError
from twinproof.graphs import Graph, find_3coloring, parse_graph
from twinproof.lemmas import run_lemma_suite
from twinproof.logging import Logger
from twinproof.protocol3col import (
    ACCEPT, REJECT, accept_probability, acceptance_operator, honest_proof, run_protocol
)
from twinproof.tools import timed


__all__ = ("RunReport", "build_parser", "main")


EXIT_SUCCESS, EXIT_FAILURE, EXIT_INPUT_ERROR, EXIT_INTERNAL_ERROR = range(4)


@dataclass(frozen=True)
class RunReport:
    """
    Report of one command.

    `results` depends only on the inputs and the seed; the wall time is kept
    outside of it.
    """

    command: str
    graph: Optional[Dict[str, int]]
    parameters: Dict[str, Any]
    seed: Optional[int]
    results: Dict[str, Any]
    exit_code: int = EXIT_SUCCESS
    wall_time: float = field(default=0.0, compare=False)

    def to_json(self) -> str:
        return json.dumps({
            "command": self.command,
            "graph": self.graph,
            "parameters": self.parameters,
            "seed": self.seed,
            "results": self.results,
            "wall_time": self.wall_time,
        }, indent=2, sort_keys=True)

    def to_text(self) -> str:
        lines = [f"{self.command}: exit {self.exit_code}"]

        if self.graph is not None:
            lines.append(f"graph: {self.graph['nodes']} nodes, {self.graph['edges']} edges")

        lines.extend(f"{name}: {value}" for name, value in sorted(self.parameters.items()))

        if self.seed is not None:
            lines.append(f"seed: {self.seed}")

        lines.extend(f"{name}: {value}" for name, value in sorted(self.results.items()))
        lines.append(f"wall time: {self.wall_time:.3f}s")

        return "\n".join(lines)


def _graph_summary_of(graph: Graph) -> Dict[str, int]:
    return {"nodes": graph.n, "edges": graph.m}


def _read_graph(path: str, logger: Logger) -> Graph:
    return parse_graph(Path(path).read_text(), logger=logger)


def _verifier_params_of(arguments: argparse.Namespace) -> VerifierParams:
    return VerifierParams(gap=arguments.gap)


def cmd_certify(arguments: argparse.Namespace, logger: Logger) -> RunReport:
    graph = _read_graph(arguments.graph, logger)
    coloring = find_3coloring(graph)
    parameters = {"trials": arguments.trials}

    if coloring is None:
        return RunReport(
            "certify",
            _graph_summary_of(graph),
            parameters,
            arguments.seed,
            {"colorable": False, "message": "not 3-colorable"},
            EXIT_FAILURE,
        )

    operators = acceptance_operator(graph)
    pair = honest_proof(graph, coloring)
    acceptance = accept_probability(operators, pair)
    accepted, _ = run_protocol(operators, pair, arguments.trials, arguments.seed)
    is_accepted = acceptance >= 1 - limits.state_tolerance and accepted == arguments.trials

    return RunReport(
        "certify",
        _graph_summary_of(graph),
        parameters,
        arguments.seed,
        {
            "colorable": True,
            "coloring": list(coloring.colors),
            "acceptance": acceptance,
            "monte_carlo_accepted": accepted,
            "verdict": ACCEPT if is_accepted else REJECT,
        },
        EXIT_SUCCESS if is_accepted else EXIT_FAILURE,
    )


def cmd_attack(arguments: argparse.Namespace, logger: Logger) -> RunReport:
    graph = _read_graph(arguments.graph, logger)
    report = attack_graph(graph, arguments.restarts, arguments.seed, logger=logger)

    return RunReport(
        "attack",
        _graph_summary_of(graph),
        {"restarts": arguments.restarts},
        arguments.seed,
        {
            "colorable": report.is_colorable,
            "seesaw": json.loads(dump_attack_result(report.seesaw)),
            "basis_value": report.basis_value,
            "coloring_value": report.coloring_value,
            "spectral_bound": report.spectral_bound,
            "best_value": report.best_value,
            "threshold": report.threshold,
            "verdict": report.verdict,
        },
        EXIT_FAILURE if report.verdict == "FAIL" else EXIT_SUCCESS,
    )


def cmd_npverify(arguments: argparse.Namespace, logger: Logger) -> RunReport:
    graph = _read_graph(arguments.graph, logger)
    certificate = load_certificate(Path(arguments.certificate).read_text())

    if certificate.nodes != graph.n:
        raise CertificateError(
            f"certificate on {certificate.nodes} nodes for a graph on {graph.n} nodes"
        )

    params = _verifier_params_of(arguments)
    circuit = compile_verifier(graph, params)
    result = classical_verify(circuit, certificate, params, logger=logger)

    return RunReport(
        "npverify",
        _graph_summary_of(graph),
        {"gap": result.gap, "gates": len(circuit), "qubits": circuit.num_qubits},
        None,
        {
            "computed_probability": result.computed_probability,
            "threshold": result.threshold,
            "bits": result.bits,
            "required_bits": result.required_bits,
            "effective_bits": result.effective_bits,
            "error_bound": result.error_bound,
            "simulated_pairs": result.simulated_pairs,
            "verdict": result.verdict,
        },
        EXIT_SUCCESS if result.verdict == ACCEPT else EXIT_FAILURE,
    )


def cmd_lemmas(arguments: argparse.Namespace, logger: Logger) -> RunReport:
    if arguments.n > limits.operator_node_cap:
        raise SizeCapError(
            f"lemma suites are capped at {limits.operator_node_cap} nodes, got {arguments.n}"
        )

    checks = run_lemma_suite(arguments.n, arguments.trials, arguments.seed)

    for check in checks:
        logger(f"{check.name}: {check.status}, worst {check.worst} against {check.bound}")

    return RunReport(
        "lemmas",
        None,
        {"n": arguments.n, "trials": arguments.trials},
        arguments.seed,
        {
            check.name: {
                "bound": check.bound,
                "worst": check.worst,
                "instances": check.instances,
                "applicable": check.applicable,
                "status": check.status,
                "stated_bound": check.stated_bound,
                "stated_bound_violations": check.stated_bound_violations,
            }
            for check in checks
        },
        EXIT_FAILURE if any(check.status == "FAIL" for check in checks) else EXIT_SUCCESS,
    )


def cmd_certificate(arguments: argparse.Namespace, logger: Logger) -> RunReport:
    graph = _read_graph(arguments.graph, logger)
    params = _verifier_params_of(arguments)
    circuit = compile_verifier(graph, params)
    bits = arguments.bits or precision_budget(
        len(circuit),
        2 ** embed_dims(graph.n)[0],
        params.gap_for(graph.n),
    )
    coloring = find_3coloring(graph)

    if coloring is not None:
        kind, pair = "honest", honest_proof(graph, coloring)
    else:
        kind = "adversary"
        pair = attack_graph(graph, arguments.restarts, arguments.seed, logger=logger).best_pair

    Path(arguments.out).write_text(dump_certificate(certificate_from_pair(pair, bits)))

    return RunReport(
        "certificate",
        _graph_summary_of(graph),
        {"bits": bits, "restarts": arguments.restarts},
        arguments.seed,
        {"kind": kind, "path": arguments.out},
    )


def cmd_circuit(arguments: argparse.Namespace, logger: Logger) -> RunReport:
    graph = _read_graph(arguments.graph, logger)
    params = _verifier_params_of(arguments)
    circuit = compile_verifier(graph, params)
    Path(arguments.out).write_text(dump_circuit(circuit))

    return RunReport(
        "circuit",
        _graph_summary_of(graph),
        {"size_bound": params.q(graph.n), "qubit_budget": params.qubit_budget(graph.n)},
        None,
        {"gates": len(circuit), "qubits": circuit.num_qubits, "path": arguments.out},
    )


def _positive_int(text: str) -> int:
    value = int(text)

    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")

    return value


def _gap(text: str) -> float:
    value = float(text)

    if not 0 < value <= 1:
        raise argparse.ArgumentTypeError(f"gap must lie in (0, 1], got {text}")

    return value


def _with_common(parser: argparse.ArgumentParser) -> argparse.ArgumentParser:
    parser.add_argument("--text", action="store_true", help="print a human-readable summary instead of JSON")
    parser.add_argument("--verbose", action="store_true", help="echo progress logs to stderr")

    return parser


def _with_seed(parser: argparse.ArgumentParser) -> argparse.ArgumentParser:
    parser.add_argument("--seed", type=int, default=defaults.seed, help="seed of every random draw")

    return parser


def _with_gap(parser: argparse.ArgumentParser) -> argparse.ArgumentParser:
    parser.add_argument(
        "--gap",
        type=_gap,
        default=None,
        help="soundness gap g, 1/(24 n^6) by default",
    )

    return parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twinproof",
        description=(
            "Verify 3-colorability with two unentangled logarithmic-size proofs."
            f" Operators are capped at {limits.operator_node_cap} nodes,"
            f" the coloring family attack at {limits.coloring_family_node_cap}."
        ),
    )
    commands = parser.add_subparsers(dest="command", required=True)

    certify = _with_seed(_with_common(commands.add_parser(
        "certify",
        help="build and evaluate the honest proof of a 3-colorable graph",
    )))
    certify.add_argument("graph")
    certify.add_argument("--trials", type=_positive_int, default=defaults.monte_carlo_trials)
    certify.set_defaults(handler=cmd_certify)

    attack = _with_seed(_with_common(commands.add_parser(
        "attack",
        help="search for cheating product proofs and check the soundness threshold",
    )))
    attack.add_argument("graph")
    attack.add_argument("--restarts", type=_positive_int, default=defaults.seesaw_restarts)
    attack.set_defaults(handler=cmd_attack)

    npverify = _with_gap(_with_common(commands.add_parser(
        "npverify",
        help="decide a classical certificate through the compiled verifier circuit",
    )))
    npverify.add_argument("graph")
    npverify.add_argument("certificate")
    npverify.set_defaults(handler=cmd_npverify)

    lemmas = _with_seed(_with_common(commands.add_parser(
        "lemmas",
        help="run the soundness lemma checks",
    )))
    lemmas.add_argument("--n", type=_positive_int, default=4)
    lemmas.add_argument("--trials", type=_positive_int, default=defaults.lemma_trials)
    lemmas.set_defaults(handler=cmd_lemmas)

    certificate = _with_gap(_with_seed(_with_common(commands.add_parser(
        "certificate",
        help="write the honest or the best cheating certificate of a graph",
    ))))
    certificate.add_argument("graph")
    certificate.add_argument("--out", required=True)
    certificate.add_argument("--bits", type=_positive_int, default=None)
    certificate.add_argument("--restarts", type=_positive_int, default=defaults.seesaw_restarts)
    certificate.set_defaults(handler=cmd_certificate)

    circuit = _with_gap(_with_common(commands.add_parser(
        "circuit",
        help="write the compiled verifier circuit as text",
    )))
    circuit.add_argument("graph")
    circuit.add_argument("--out", required=True)
    circuit.set_defaults(handler=cmd_circuit)

    return parser


def _error_code_of(error: Exception) -> int:
    return EXIT_INPUT_ERROR if isinstance(error, (InputError, OSError)) else EXIT_INTERNAL_ERROR


def main(argv: Optional[Sequence[str]] = None) -> int:
    arguments = build_parser().parse_args(argv)
    handler: Callable[[argparse.Namespace, Logger], RunReport] = arguments.handler
    logger = Logger(stream=sys.stderr if arguments.verbose else None)

    try:
        report, wall_time = timed(lambda: handler(arguments, logger))
    except (TwinProofError, OSError) as error:
        print(f"error: {error}", file=sys.stderr)

        return _error_code_of(error)

    report = replace(report, wall_time=wall_time.total_seconds())
    print(report.to_text() if arguments.text else report.to_json())

    return report.exit_code
