"""
Corpus replay: worked facts stored as JSON data, each decided by one toolkit operation.
"""

import fnmatch
import json
import logging
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Union

from .group import (
    check_ap1_group, check_dt_group, cyclic_group, product_group_probe, trivial_group, window_group_check
)
from .image import DigitalImage, ImageLike, SimpleClosedCurve, image_from_dict, validate_curve, window_image
from .lattice import LatticeAdjacency, k_value, lattice_neighborhood
from .product import (
    adjacency_existence, c_star, condition_pairs, g_star, lattice_relation, neighborhood_form_admissible,
    neighborhood_form_failures, product, relation_neighborhood
)

logger = logging.getLogger(__name__)

BASE_DIR = Path(__file__).parent.parent
DEFAULT_CORPUS_DIR = BASE_DIR / 'corpus'
DEFAULT_FIXTURES_DIR = BASE_DIR / 'fixtures'


class FixtureLoadError(ValueError):
    """Raised when a fixture or fact file cannot be loaded or validated."""


@dataclass
class CorpusFact:
    """One checkable fact: a construction, the expected result and where it comes from."""
    id: str
    check: str
    construct: Dict[str, Any]
    expect: Dict[str, Any]
    provenance: str = ""

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'CorpusFact':
        for key in ('id', 'check', 'expect'):
            if key not in data:
                raise FixtureLoadError(f"Fact is missing required field: {key}")
        return cls(
            id=data['id'],
            check=data['check'],
            construct=data.get('construct', {}),
            expect=data['expect'],
            provenance=data.get('provenance', '')
        )


@dataclass
class FactResult:
    id: str
    check: str
    passed: bool
    expected: Dict[str, Any]
    computed: Dict[str, Any]
    error: Optional[str] = None

    @property
    def diff(self) -> Dict[str, Any]:
        return {
            key: {'expected': value, 'computed': self.computed.get(key)}
            for key, value in self.expected.items()
            if self.computed.get(key) != value
        }

    def to_dict(self) -> Dict[str, Any]:
        return {
            'id': self.id,
            'check': self.check,
            'passed': self.passed,
            'diff': self.diff if not self.passed else {},
            'error': self.error
        }


@dataclass
class CorpusSummary:
    results: List[FactResult] = field(default_factory=list)

    @property
    def total(self) -> int:
        return len(self.results)

    @property
    def passed(self) -> int:
        return sum(1 for r in self.results if r.passed)

    @property
    def failed(self) -> int:
        return self.total - self.passed

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            'total': self.total,
            'passed': self.passed,
            'failed': self.failed,
            'results': [r.to_dict() for r in self.results]
        }

    def rows(self) -> List[Dict[str, Any]]:
        """Flat rows for JSONL / CSV export."""
        return [
            {'id': r.id, 'check': r.check, 'passed': r.passed,
             'diff': json.dumps(r.diff) if not r.passed else '', 'error': r.error or ''}
            for r in self.results
        ]


Fixtures = Dict[str, ImageLike]
FactHandler = Callable[[Dict[str, Any], Fixtures], Dict[str, Any]]

FACT_HANDLERS: Dict[str, FactHandler] = {}


def fact_handler(name: str):
    """Register a handler computing the result fields of one fact kind."""
    def register(func: FactHandler) -> FactHandler:
        FACT_HANDLERS[name] = func
        return func
    return register


def _image(fixtures: Fixtures, name: str) -> ImageLike:
    if name not in fixtures:
        raise FixtureLoadError(f"Unknown fixture '{name}'")
    return fixtures[name]


def _product(construct: Dict[str, Any], fixtures: Fixtures):
    return product([_image(fixtures, name) for name in construct['factors']])


def _points(points) -> List[List[int]]:
    return [list(p) for p in sorted(points)]


@fact_handler('k_table')
def _k_table(construct, fixtures):
    n = construct['n']
    return {'k': [k_value(t, n) for t in range(1, n + 1)]}


@fact_handler('curve')
def _curve(construct, fixtures):
    name = construct['image']
    curve = _image(fixtures, name)
    if not isinstance(curve, SimpleClosedCurve):
        raise FixtureLoadError(f"Fixture '{name}' is not an ordered curve")
    validated = validate_curve(curve.seq, curve.adj.t)
    return {'valid': True, 'l': validated.l, 'k': validated.adj.k}


@fact_handler('existence')
def _existence(construct, fixtures):
    report = adjacency_existence(_product(construct, fixtures), construct['kind'], construct.get('u'))
    return {'admissible_k': report.admissible_k, 'star_k': report.star_k}


@fact_handler('neighborhood_form')
def _neighborhood_form(construct, fixtures):
    prod = _product(construct, fixtures)
    kind, u = construct['kind'], construct.get('u')
    admissible = neighborhood_form_admissible(prod, kind, u)
    result = {'admissible_k': [LatticeAdjacency(t, prod.dim).k for t in admissible]}
    if 'point' in construct:
        p = tuple(construct['point'])
        result['fails_at_point_every_t'] = all(
            p in neighborhood_form_failures(prod, kind, t, u) for t in range(1, prod.dim + 1)
        )
    return result


@fact_handler('c_star')
def _c_star(construct, fixtures):
    first, second = construct['factors']
    decision = c_star(_image(fixtures, first), _image(fixtures, second))
    return {
        'exists': decision.exists,
        'k': decision.adjacency.k if decision.exists else None,
        'admissible_k': decision.report.admissible_k
    }


@fact_handler('g_star')
def _g_star(construct, fixtures):
    first, second = construct['factors']
    relation, k_star = g_star(_image(fixtures, first), _image(fixtures, second))
    lattice_pairs = lattice_relation(_product(construct, fixtures), k_star.t).pairs
    return {
        'k_star': k_star.k,
        'contained': relation.pairs <= lattice_pairs,
        'equal': relation.pairs == lattice_pairs
    }


@fact_handler('c_star_neighborhoods')
def _c_star_neighborhoods(construct, fixtures):
    first, second = construct['factors']
    decision = c_star(_image(fixtures, first), _image(fixtures, second))
    if not decision.exists:
        return {'equal': False}
    prod = _product(construct, fixtures)
    g_relation, _ = g_star(_image(fixtures, first), _image(fixtures, second))
    c_relation = lattice_relation(prod, decision.adjacency.t)
    equal = all(
        relation_neighborhood(c_relation, p)[0]
        == relation_neighborhood(g_relation, p)[0]
        == lattice_neighborhood(p, decision.adjacency.t, prod.point_set)[0]
        for p in prod.points
    )
    return {'equal': equal}


@fact_handler('condition_neighbors')
def _condition_neighbors(construct, fixtures):
    prod = _product(construct, fixtures)
    relation = condition_pairs(prod, construct['u'])
    _, punctured = relation_neighborhood(relation, tuple(construct['point']))
    return {'neighbors': _points(punctured), 'size': len(punctured)}


@fact_handler('lattice_neighborhood_sizes')
def _lattice_neighborhood_sizes(construct, fixtures):
    prod = _product(construct, fixtures)
    p = tuple(construct['point'])
    return {
        'sizes': [len(lattice_neighborhood(p, t, prod.point_set)[1]) for t in range(1, prod.dim + 1)],
        'k': [k_value(t, prod.dim) for t in range(1, prod.dim + 1)]
    }


@fact_handler('city_block_c_star')
def _city_block_c_star(construct, fixtures):
    """Random pairs of images with 2n-adjacency; every pair should carry C_k* = 2(n1 + n2)."""
    rng = random.Random(construct.get('seed', 0))
    matches = 0
    for _ in range(construct['samples']):
        images = []
        for _ in range(2):
            n = rng.randint(1, construct.get('max_dim', 3))
            cells = [tuple(rng.randint(0, 2) for _ in range(n)) for _ in range(rng.randint(1, 5))]
            images.append(DigitalImage(tuple(cells), LatticeAdjacency(1, n)))
        decision = c_star(*images)
        if decision.exists and decision.adjacency.k == 2 * (images[0].dim + images[1].dim):
            matches += 1
    return {'all_exist_with_k_2n': matches == construct['samples']}


@fact_handler('window_existence')
def _window_existence(construct, fixtures):
    radius = construct.get('radius', 3)
    windows = [window_image(n, 1, radius) for n in construct['dims']]
    report = adjacency_existence(product(windows), 'ap', 1)
    return {'t1_admissible': 1 in report.admissible_t, 'admissible_k': report.admissible_k}


def _group_for(fixtures: Fixtures, name: str):
    image = _image(fixtures, name)
    if isinstance(image, SimpleClosedCurve):
        return image, cyclic_group(image)
    if len(image) == 1:
        return image, trivial_group(image.points[0])
    raise FixtureLoadError(f"Fixture '{name}' has no default group; use a curve or a singleton")


@fact_handler('dt_group')
def _dt_group(construct, fixtures):
    image, group = _group_for(fixtures, construct['image'])
    verdict = check_dt_group(image, group, use_c_star=construct.get('use_c_star', False))
    return {'holds': verdict.holds, 'adjacency_used': verdict.adjacency_used, 'abelian': verdict.abelian}


@fact_handler('ap1_group')
def _ap1_group(construct, fixtures):
    image, group = _group_for(fixtures, construct['image'])
    verdict = check_ap1_group(image, group, star=construct.get('star', False))
    return {'holds': verdict.holds, 'adjacency_used': verdict.adjacency_used, 'reason': verdict.reason}


@fact_handler('window_group')
def _window_group(construct, fixtures):
    verdict = window_group_check(construct['n'], construct['t'], construct['radius'], construct['u'])
    witness = verdict.multiplication.witness if verdict.multiplication else None
    return {
        'holds': verdict.holds,
        'witness': [list(p) for p in witness] if witness else None,
        'abelian': verdict.abelian
    }


@fact_handler('product_group')
def _product_group(construct, fixtures):
    first, second = construct['images']
    image1, group1 = _group_for(fixtures, first)
    image2, group2 = _group_for(fixtures, second)
    verdict = product_group_probe(image1, group1, image2, group2)
    return {'holds': verdict.holds, 'reason': verdict.reason}


def load_fixtures(fixtures_dir: Union[str, Path, None] = None) -> Fixtures:
    """
    Load and validate every fixture image of a directory.

    Raises:
        FixtureLoadError: If the directory is missing or a fixture is invalid
    """
    directory = Path(fixtures_dir) if fixtures_dir else DEFAULT_FIXTURES_DIR
    if not directory.is_dir():
        raise FixtureLoadError(f"Fixtures directory not found: {directory}")
    fixtures = {}
    for path in sorted(directory.glob('*.json')):
        try:
            with open(path, 'r', encoding='utf-8') as f:
                fixtures[path.stem] = image_from_dict(json.load(f))
        except (OSError, ValueError) as e:
            raise FixtureLoadError(f"Invalid fixture {path}: {e}") from e
    logger.info(f"Loaded {len(fixtures)} fixtures from {directory}")
    return fixtures


def load_facts(corpus_dir: Union[str, Path, None] = None) -> List[CorpusFact]:
    """
    Load fact files (JSON lists of facts), sorted by id.

    Raises:
        FixtureLoadError: On unreadable files, unknown checks or duplicate ids
    """
    directory = Path(corpus_dir) if corpus_dir else DEFAULT_CORPUS_DIR
    if not directory.is_dir():
        raise FixtureLoadError(f"Corpus directory not found: {directory}")
    facts: Dict[str, CorpusFact] = {}
    for path in sorted(directory.glob('*.json')):
        try:
            with open(path, 'r', encoding='utf-8') as f:
                entries = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise FixtureLoadError(f"Cannot read fact file {path}: {e}") from e
        if not isinstance(entries, list):
            raise FixtureLoadError(f"Fact file {path} must contain a JSON list")
        for entry in entries:
            fact = CorpusFact.from_dict(entry)
            if fact.check not in FACT_HANDLERS:
                raise FixtureLoadError(f"Fact {fact.id} uses unknown check '{fact.check}'")
            if fact.id in facts:
                raise FixtureLoadError(f"Duplicate fact id '{fact.id}' in {path}")
            facts[fact.id] = fact
    logger.info(f"Loaded {len(facts)} facts from {directory}")
    return [facts[key] for key in sorted(facts)]


def select_facts(facts: List[CorpusFact], pattern: Optional[str]) -> List[CorpusFact]:
    """Facts whose id starts with the pattern or matches it as a glob."""
    if not pattern:
        return list(facts)
    return [f for f in facts if f.id.startswith(pattern) or fnmatch.fnmatchcase(f.id, pattern)]


def run_fact(fact: CorpusFact, fixtures: Fixtures) -> FactResult:
    try:
        computed = FACT_HANDLERS[fact.check](fact.construct, fixtures)
    except (ValueError, KeyError) as e:
        logger.error(f"Fact {fact.id} raised: {e}")
        return FactResult(fact.id, fact.check, False, fact.expect, {}, error=str(e))
    passed = all(computed.get(key) == value for key, value in fact.expect.items())
    if not passed:
        logger.warning(f"Fact {fact.id} mismatch: computed {computed}")
    return FactResult(fact.id, fact.check, passed, fact.expect, computed)


def run_corpus(
    pattern: Optional[str] = None,
    corpus_dir: Union[str, Path, None] = None,
    fixtures_dir: Union[str, Path, None] = None,
    workers: int = 1
) -> CorpusSummary:
    """
    Replay the corpus facts and compare computed against expected values.

    Args:
        pattern: Id prefix or glob selecting facts; None runs all
        corpus_dir: Directory of fact files
        fixtures_dir: Directory of fixture images
        workers: Number of worker threads

    Returns:
        CorpusSummary with results in id order

    Raises:
        FixtureLoadError: If fixtures or facts cannot be loaded
    """
    if workers < 1:
        raise ValueError(f"Worker count must be positive, got {workers}")
    fixtures = load_fixtures(fixtures_dir)
    facts = select_facts(load_facts(corpus_dir), pattern)
    logger.info(f"Running {len(facts)} facts with {workers} worker(s)")

    if workers == 1:
        results = [run_fact(fact, fixtures) for fact in facts]
    else:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            results = list(executor.map(lambda fact: run_fact(fact, fixtures), facts))
    return CorpusSummary(sorted(results, key=lambda r: r.id))
