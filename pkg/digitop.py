#!/usr/bin/env python3
"""
digitop - Main CLI Interface
Check product adjacencies, digital continuity and digital-topological groups by exact enumeration.

Exit codes: 0 the property holds, 2 the property is refuted, 1 usage or input error.
"""

import click
import json
import logging
import sys
from pathlib import Path

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent / 'src'))

from src.config_manager import ConfigManager
from src.continuity import connected_image_check, is_continuous_lattice, is_continuous_relation
from src.corpus import run_corpus
from src.group import ap2_probe, check_ap1_group, check_dt_group, window_group_check
from src.image import CurveValidationError, as_image, image_from_dict
from src.lattice import LatticeAdjacency
from src.product import (
    adjacency_existence, ap_relation, c_star, g_star, lattice_relation, product, ProductKind
)
from src.utils import (
    setup_logging, load_json_file, load_image_file, load_group_file, load_map_file,
    save_results, format_adjacency_table, format_existence_summary, format_c_star_summary,
    format_relation_summary, format_continuity_summary, format_group_summary, format_corpus_summary
)

logger = logging.getLogger(__name__)

EXIT_HOLDS = 0
EXIT_ERROR = 1
EXIT_REFUTED = 2


class DigitopGroup(click.Group):
    """Click group mapping usage errors to exit code 1 instead of click's 2."""

    def main(self, *args, **kwargs):
        kwargs['standalone_mode'] = False
        try:
            rv = super().main(*args, **kwargs)
        except click.ClickException as e:
            e.show()
            sys.exit(EXIT_ERROR)
        except click.Abort:
            click.echo("Aborted!", err=True)
            sys.exit(EXIT_ERROR)
        sys.exit(rv or 0)


def fail(message: str) -> None:
    click.echo(f"❌ {message}", err=True)
    sys.exit(EXIT_ERROR)


def emit(data: dict, as_json: bool, text: str) -> None:
    if as_json:
        click.echo(json.dumps(data, indent=2))
    else:
        click.echo(text)


@click.group(cls=DigitopGroup)
@click.option('--verbose', '-v', is_flag=True, help='Enable verbose logging')
@click.option('--quiet', '-q', is_flag=True, help='Suppress output except errors')
@click.option('--config', '-c', type=click.Path(exists=True), help='Path to configuration file (YAML)')
def cli(verbose, quiet, config):
    """digitop - verify digital-topology facts on integer lattices."""
    config_manager = ConfigManager(config)

    ctx = click.get_current_context()
    ctx.ensure_object(dict)
    ctx.obj['config_manager'] = config_manager

    if quiet:
        setup_logging('ERROR')
    elif verbose or config_manager.config.processing.verbose:
        setup_logging('DEBUG')
    else:
        setup_logging('WARNING')


@cli.command('adjacency-table')
@click.argument('n', type=click.IntRange(1, 12))
@click.option('--json', 'as_json', is_flag=True, help='Print JSON instead of a table')
def adjacency_table(n, as_json):
    """Print k(t, n) for every t in [1, N]."""
    rows = [LatticeAdjacency(t, n).to_dict() for t in range(1, n + 1)]
    emit({'n': n, 'rows': rows}, as_json, format_adjacency_table(n))


@cli.command('validate-curve')
@click.argument('image_file', type=click.Path(exists=True))
@click.option('--json', 'as_json', is_flag=True, help='Print JSON')
def validate_curve_command(image_file, as_json):
    """Validate the point order of IMAGE_FILE as a simple closed k-curve."""
    try:
        data = load_json_file(image_file, "image")
        if not isinstance(data, dict):
            raise ValueError("An image must be a JSON object")
        curve = image_from_dict(dict(data, ordered=True))
    except CurveValidationError as e:
        pair = list(e.index_pair) if e.index_pair else None
        emit({'valid': False, 'index_pair': pair, 'reason': str(e)}, as_json, f"❌ Not a simple closed curve: {e}")
        sys.exit(EXIT_REFUTED)
    except ValueError as e:
        fail(str(e))

    emit(
        {'valid': True, 'l': curve.l, 'n': curve.adj.n, 'k': curve.adj.k},
        as_json,
        f"✅ Valid SC_{curve.adj.k}^{{{curve.adj.n},{curve.l}}}"
    )


@cli.command('check-product')
@click.argument('image_files', nargs=-1, required=True, type=click.Path(exists=True))
@click.option('--kind', '-k', default='normal',
              type=click.Choice(['normal', 'c-compatible', 'ap', 'g-star']), help='Product structure')
@click.option('--u', '-u', 'u', type=int, default=1, help='Moving factors for --kind ap')
@click.option('--star', is_flag=True, help='Decide the minimal adjacency (C_k* for c-compatible)')
@click.option('--json', 'as_json', is_flag=True, help='Print JSON')
def check_product(image_files, kind, u, star, as_json):
    """Decide which k(t, N) realize a product adjacency on IMAGE_FILES."""
    try:
        images = [load_image_file(path) for path in image_files]

        if kind == 'g-star':
            if len(images) != 2:
                raise ValueError("G_k* is defined for two factors only")
            relation, k_star = g_star(*images)
            data = {'kind': 'g_star', 'k_star': k_star.k, 'pair_count': len(relation)}
            emit(data, as_json, format_relation_summary(relation, f"G_k* with k*={k_star.k}"))
            return

        if kind == 'c-compatible' and star:
            if len(images) != 2:
                raise ValueError("C_k* is defined for two factors only")
            result = c_star(*images)
            emit(result.to_dict(), as_json, format_c_star_summary(result))
            sys.exit(EXIT_HOLDS if result.exists else EXIT_REFUTED)

        report = adjacency_existence(product(images), ProductKind.parse(kind), u if kind == 'ap' else None)
    except ValueError as e:
        fail(str(e))

    emit(report.to_dict(), as_json, format_existence_summary(report))
    sys.exit(EXIT_HOLDS if report.exists else EXIT_REFUTED)


@cli.command('check-continuity')
@click.argument('map_file', type=click.Path(exists=True))
@click.option('--relation', '-r', default='lattice',
              type=click.Choice(['lattice', 'g-star', 'c-star', 'ap']), help='Domain adjacency or relation')
@click.option('--u', '-u', 'u', type=int, default=1, help='Moving factors for --relation ap')
@click.option('--star/--no-star', default=True, help='Use AP_u* only, or every admissible AP_u')
@click.option('--connected-images', is_flag=True,
              help='For lattice: also check that connected subsets map to connected sets')
@click.option('--max-subset-size', type=int, help='Largest subset for --connected-images')
@click.option('--json', 'as_json', is_flag=True, help='Print JSON')
@click.pass_context
def check_continuity(ctx, map_file, relation, u, star, connected_images, max_subset_size, as_json):
    """Check digital continuity of the map in MAP_FILE."""
    config_manager = ctx.obj.get('config_manager')
    merged = config_manager.merge_with_cli_args(max_subset_size=max_subset_size)
    try:
        spec = load_map_file(map_file)
        if relation == 'lattice':
            if spec.domain_image is None:
                raise ValueError("Lattice continuity needs a domain_image")
            domain_adj = as_image(spec.domain_image).adj
            report = is_continuous_lattice(spec.map, domain_adj)
            label = "Map"
            if connected_images:
                preserved = connected_image_check(
                    spec.map, domain_adj,
                    max_subset_size=merged['max_subset_size'],
                    max_subsets=config_manager.config.checks.max_subsets
                )
                if preserved != report.continuous:
                    logger.warning("Connected-image check disagrees with the pair check")
                data = dict(report.to_dict(), connected_images=preserved)
                text = format_continuity_summary(report, label)
                text += f"\n   • connected subsets keep connected images: {preserved}"
                emit(data, as_json, text)
                sys.exit(EXIT_HOLDS if report.continuous and preserved else EXIT_REFUTED)
        else:
            if len(spec.domain_factors) < 2:
                raise ValueError("Relation continuity needs at least two domain_factors")
            if relation in ('g-star', 'c-star') and len(spec.domain_factors) != 2:
                raise ValueError(
                    f"{relation} continuity needs exactly two domain_factors, got {len(spec.domain_factors)}"
                )
            prod = product(spec.domain_factors)
            if relation == 'g-star':
                rel, k_star = g_star(*spec.domain_factors)
                label = f"Map on G_k* (k*={k_star.k})"
            elif relation == 'c-star':
                decision = c_star(*spec.domain_factors)
                if not decision.exists:
                    raise ValueError(f"No C_k* adjacency: {decision.diagnostic}")
                rel = lattice_relation(prod, decision.adjacency.t)
                label = f"Map on C_k* (k*={decision.k_star.k})"
            elif star:
                rel, used = ap_relation(prod, u)
                label = f"Map on AP_{u}* = {used}"
            else:
                admissible = adjacency_existence(prod, ProductKind.AP, u).admissible_t
                if not admissible:
                    raise ValueError(f"No AP_{u} adjacency exists")
                reports = {t: is_continuous_relation(spec.map, lattice_relation(prod, t)) for t in admissible}
                data = {'per_t': {str(t): r.to_dict() for t, r in reports.items()}}
                text = "\n".join(format_continuity_summary(r, f"Map on AP_{u} with t={t}") for t, r in reports.items())
                emit(data, as_json, text)
                sys.exit(EXIT_HOLDS if any(r.continuous for r in reports.values()) else EXIT_REFUTED)
            report = is_continuous_relation(spec.map, rel)
    except ValueError as e:
        fail(str(e))

    emit(report.to_dict(), as_json, format_continuity_summary(report, label))
    sys.exit(EXIT_HOLDS if report.continuous else EXIT_REFUTED)


@cli.command('check-group')
@click.argument('image_file', type=click.Path(exists=True))
@click.argument('group')
@click.option('--structure', '-s', default='dt',
              type=click.Choice(['dt', 'ap1', 'ap1-star', 'ap2-probe']), help='Group structure to certify')
@click.option('--use-c-star', is_flag=True, help='For dt: use the C_k* pair set instead of G_k*')
@click.option('--json', 'as_json', is_flag=True, help='Print JSON')
def check_group(image_file, group, structure, use_c_star, as_json):
    """Certify a group structure; GROUP is a group file or the word 'cyclic'."""
    try:
        image = load_image_file(image_file)
        table = load_group_file(group, image)
        if structure == 'dt':
            verdict = check_dt_group(image, table, use_c_star=use_c_star)
        elif structure == 'ap2-probe':
            verdict = ap2_probe(image, table)
        else:
            verdict = check_ap1_group(image, table, star=(structure == 'ap1-star'))
    except (ValueError, FileNotFoundError) as e:
        fail(str(e))

    emit(verdict.to_dict(), as_json, format_group_summary(verdict))
    sys.exit(EXIT_HOLDS if verdict.holds else EXIT_REFUTED)


@cli.command('check-window-group')
@click.argument('n', type=click.IntRange(1, 4))
@click.argument('t', type=click.IntRange(1, 4))
@click.option('--u', '-u', 'u', type=click.IntRange(1, 2), default=1, help='1 for AP_1, 2 for the AP_2 probe')
@click.option('--radius', '-r', type=click.IntRange(min=1), help='Window radius (default from config)')
@click.option('--json', 'as_json', is_flag=True, help='Print JSON')
@click.pass_context
def check_window_group(ctx, n, t, u, radius, as_json):
    """Check (Z^N, k(T, N), +) with coordinatewise addition on a window."""
    merged = ctx.obj.get('config_manager').merge_with_cli_args(window_radius=radius)
    try:
        verdict = window_group_check(n, t, merged['window_radius'], u)
    except ValueError as e:
        fail(str(e))

    emit(verdict.to_dict(), as_json, format_group_summary(verdict))
    sys.exit(EXIT_HOLDS if verdict.holds else EXIT_REFUTED)


@cli.command('verify-corpus')
@click.option('--filter', 'pattern', help='Fact id prefix or glob pattern')
@click.option('--workers', '-w', type=int, help='Number of worker threads')
@click.option('--format', '-f', 'format', type=click.Choice(['table', 'json', 'jsonl', 'csv']),
              help='Output format')
@click.option('--output', '-o', help='Write the summary to this file instead of stdout')
@click.option('--corpus-dir', type=click.Path(exists=True, file_okay=False), help='Directory of fact files')
@click.option('--fixtures-dir', type=click.Path(exists=True, file_okay=False), help='Directory of fixture images')
@click.option('--json', 'as_json', is_flag=True, help='Shorthand for --format json')
@click.pass_context
def verify_corpus(ctx, pattern, workers, format, output, corpus_dir, fixtures_dir, as_json):
    """Replay every corpus fact and compare computed against expected values."""
    config_manager = ctx.obj.get('config_manager')
    merged = config_manager.merge_with_cli_args(
        workers=workers,
        format='json' if as_json else format,
        corpus_dir=corpus_dir,
        fixtures_dir=fixtures_dir
    )
    if not config_manager.validate_config():
        fail("Invalid configuration")
    format = merged.get('format', 'table')

    try:
        summary = run_corpus(
            pattern,
            corpus_dir=merged.get('corpus_dir'),
            fixtures_dir=merged.get('fixtures_dir'),
            workers=merged.get('workers', 1)
        )
    except ValueError as e:
        fail(str(e))

    if summary.total == 0:
        fail(f"No facts match '{pattern}'")

    document = summary.to_dict()
    if output:
        save_format = 'json' if format == 'table' else format
        if not save_results(document, output, save_format, rows=summary.rows()):
            fail(f"Could not write {output}")
        click.echo(f"💾 Summary saved to: {output}", err=True)
    elif format == 'json':
        click.echo(json.dumps(document, indent=2))
    elif format == 'jsonl':
        for row in summary.rows():
            click.echo(json.dumps(row))
    elif format == 'csv':
        import pandas as pd
        click.echo(pd.DataFrame(summary.rows()).to_csv(index=False), nl=False)
    else:
        click.echo(format_corpus_summary(document))

    sys.exit(EXIT_HOLDS if summary.ok else EXIT_REFUTED)


if __name__ == '__main__':
    cli()
