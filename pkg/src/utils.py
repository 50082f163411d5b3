"""
Utility functions for digitop: logging setup, file loaders, result writers and
human-readable summaries.
"""

import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

import pandas as pd

from .continuity import ContinuityReport, MapSpec, map_from_dict
from .group import GroupTable, GroupVerdict, group_from_dict
from .image import ImageLike, SimpleClosedCurve, as_image, image_from_dict
from .lattice import k_value
from .product import CStarResult, ExistenceReport, PairRelation

logger = logging.getLogger(__name__)

SUPPORTED_FORMATS = ['json', 'jsonl', 'csv']


def setup_logging(level: str = "WARNING") -> None:
    """Setup logging configuration; logs go to stderr so stdout stays machine-readable."""
    logging.basicConfig(
        level=getattr(logging, level.upper()),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S',
        stream=sys.stderr,
        force=True
    )


def load_json_file(path: str, kind: str = "input") -> Any:
    """
    Read a JSON file.

    Raises:
        FileNotFoundError: If the file does not exist
        ValueError: If the file is not valid JSON
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"{kind.capitalize()} file not found: {path}")
    try:
        with open(path, 'r', encoding='utf-8') as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise ValueError(f"Invalid JSON in {kind} file {path}: {str(e)}")


def load_image_file(path: str) -> ImageLike:
    """
    Load an image or curve file; curves are validated on the way in.

    Args:
        path: Path to an image JSON file

    Returns:
        DigitalImage, or SimpleClosedCurve for ordered inputs
    """
    image = image_from_dict(load_json_file(path, "image"))
    logger.info(f"Loaded {'curve' if isinstance(image, SimpleClosedCurve) else 'image'} "
                f"with {len(as_image(image))} points from {path}")
    return image


def load_group_file(spec: str, image: ImageLike) -> GroupTable:
    """Load a group file, or build the cyclic group when spec is the word 'cyclic'."""
    if spec == 'cyclic':
        return group_from_dict({'cyclic': True}, image)
    return group_from_dict(load_json_file(spec, "group"), image)


def load_map_file(path: str) -> MapSpec:
    return map_from_dict(load_json_file(path, "map"))


def validate_output_format(format_name: str) -> str:
    """
    Validate and normalize output format name.

    Raises:
        ValueError: If format is not supported
    """
    format_name = format_name.lower().strip()
    if format_name not in SUPPORTED_FORMATS:
        raise ValueError(f"Unsupported format: {format_name}. Supported: {SUPPORTED_FORMATS}")
    return format_name


def save_results(
    results: Dict[str, Any],
    output_path: str,
    format: str = 'json',
    rows: Optional[List[Dict[str, Any]]] = None
) -> bool:
    """
    Save results to file.

    Args:
        results: Full result document (written as is for json)
        output_path: Output file path
        format: Output format ('json', 'jsonl', 'csv')
        rows: Flat rows for jsonl / csv; defaults to results['results']

    Returns:
        Success status
    """
    try:
        format = validate_output_format(format)
        output_path = Path(output_path)
        output_path.parent.mkdir(parents=True, exist_ok=True)
        rows = rows if rows is not None else results.get('results', [])

        if format == 'json':
            with open(output_path, 'w', encoding='utf-8') as f:
                json.dump(results, f, indent=2, ensure_ascii=False)

        elif format == 'jsonl':
            with open(output_path, 'w', encoding='utf-8') as f:
                for row in rows:
                    f.write(json.dumps(row, ensure_ascii=False) + '\n')

        elif format == 'csv':
            pd.DataFrame(rows).to_csv(output_path, index=False)

        logger.info(f"Results saved to: {output_path}")
        return True

    except (OSError, ValueError) as e:
        logger.error(f"Failed to save results: {str(e)}")
        return False


def format_adjacency_table(n: int) -> str:
    """Rows t, k(t, n) for every t in [1, n]."""
    lines = [f"k(t, {n}) for Z^{n}", f"{'t':>4}  {'k':>8}"]
    for t in range(1, n + 1):
        lines.append(f"{t:>4}  {k_value(t, n):>8}")
    return "\n".join(lines)


def format_existence_summary(report: ExistenceReport) -> str:
    kind = f"ap(u={report.u})" if report.u is not None else report.kind
    lines = []
    if report.exists:
        lines.append(f"✅ {kind} adjacency exists in Z^{report.n}")
        lines.append(f"📊 Admissible k: {report.admissible_k}")
        lines.append(f"⭐ Minimal: k({report.star_t},{report.n})={report.star_k}")
    else:
        lines.append(f"❌ No {kind} adjacency exists in Z^{report.n}")
    if report.witnesses:
        lines.append("\n📋 Rejected t values:")
        for t, witness in sorted(report.witnesses.items()):
            lines.append(f"   • t={t}: {list(witness.p)} / {list(witness.q)} ({witness.direction})")
    return "\n".join(lines)


def format_c_star_summary(result: CStarResult) -> str:
    mark = "✅" if result.exists else "❌"
    return f"{mark} C_k*: {result.diagnostic}\n\n{format_existence_summary(result.report)}"


def format_relation_summary(relation: PairRelation, label: str) -> str:
    degrees = [len(relation.neighbor_map[p]) for p in relation.ground]
    return "\n".join([
        f"🔗 {label}",
        f"📊 Points: {len(relation.ground)}, related pairs: {len(relation)}",
        f"   • max degree: {max(degrees) if degrees else 0}"
    ])


def format_continuity_summary(report: ContinuityReport, label: str = "Map") -> str:
    if report.continuous:
        return f"✅ {label} is continuous ({report.checked_pairs} pairs checked)"
    p, q, fp, fq = report.witness
    return f"❌ {label} is not continuous: {list(p)}, {list(q)} map to {list(fp)}, {list(fq)}"


def format_group_summary(verdict: GroupVerdict) -> str:
    lines = [
        f"{'✅' if verdict.holds else '❌'} {verdict.structure}: {'holds' if verdict.holds else 'fails'}",
        f"🔗 Adjacency: {verdict.adjacency_used}"
    ]
    if verdict.reason:
        lines.append(f"   • reason: {verdict.reason}")
    if verdict.multiplication is not None:
        lines.append(format_continuity_summary(verdict.multiplication, "Multiplication"))
    if verdict.inverse is not None:
        lines.append(format_continuity_summary(verdict.inverse, "Inverse"))
    for t, ok in sorted(verdict.per_t.items()):
        lines.append(f"   • t={t}: {'continuous' if ok else 'not continuous'}")
    if verdict.abelian is not None:
        lines.append(f"   • abelian: {verdict.abelian}")
    return "\n".join(lines)


def format_corpus_summary(summary: Dict[str, Any]) -> str:
    """Text table of a corpus summary dictionary."""
    lines = [f"{'id':<44} {'check':<28} result"]
    lines.append("-" * 80)
    for row in summary.get('results', []):
        lines.append(f"{row['id']:<44} {row['check']:<28} {'✅ pass' if row['passed'] else '❌ FAIL'}")
        for key, change in row.get('diff', {}).items():
            lines.append(f"    {key}: expected {change['expected']}, computed {change['computed']}")
        if row.get('error'):
            lines.append(f"    error: {row['error']}")
    lines.append("-" * 80)
    lines.append(f"📊 {summary['passed']}/{summary['total']} facts pass, {summary['failed']} fail")
    return "\n".join(lines)
