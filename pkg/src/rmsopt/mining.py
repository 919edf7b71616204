"""Flexible pattern mining over optimization archives.

Rules of the forms x < c, x > c, x = c and x != c are generated per decision
variable, kept when their support in the selected solution set (significance)
reaches a threshold, and combined Apriori-style into conjunctions whose
support in the unselected set (unsignificance) measures how uniquely they
describe the preferred solutions.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .model import ProblemInstance, RmsConfiguration, variant_prefix

log = logging.getLogger(__name__)

CATEGORICAL = "categorical"
NUMERIC = "numeric"

RELATIONS = ("<", ">", "=", "!=")
_PRETTY = {"<": "<", ">": ">", "=": "=", "!=": "≠"}


@dataclass(frozen=True)
class FeatureColumn:
    name: str
    kind: str


@dataclass(frozen=True)
class Rule:
    variable: str
    relation: str
    threshold: float

    def __post_init__(self):
        if self.relation not in RELATIONS:
            raise ValueError(f"unknown relation {self.relation!r}")

    def matches(self, value) -> bool:
        if self.relation == "<":
            return value < self.threshold
        if self.relation == ">":
            return value > self.threshold
        if self.relation == "=":
            return value == self.threshold
        return value != self.threshold

    def text(self) -> str:
        thr = self.threshold
        if isinstance(thr, float) and thr.is_integer():
            thr = int(thr)
        return f"{self.variable} {_PRETTY[self.relation]} {thr}"

    def sort_key(self):
        return (self.variable, self.relation, float(self.threshold))


@dataclass(frozen=True)
class RuleInteraction:
    rules: tuple[Rule, ...]
    significance: float
    unsignificance: float

    @property
    def level(self) -> int:
        return len(self.rules)

    def text(self) -> str:
        return " ∧ ".join(r.text() for r in self.rules)


@dataclass
class FeatureTable:
    columns: tuple[FeatureColumn, ...]
    rows: list[tuple]
    selected: list[bool]

    def __post_init__(self):
        if len(self.rows) != len(self.selected):
            raise ValueError("rows and selection mask differ in length")
        self.index = {c.name: i for i, c in enumerate(self.columns)}

    @property
    def num_selected(self) -> int:
        return sum(self.selected)

    def column_values(self, name: str, selected_only=False):
        i = self.index[name]
        return [
            row[i] for row, sel in zip(self.rows, self.selected) if sel or not selected_only
        ]


def feature_columns(inst: ProblemInstance) -> tuple[FeatureColumn, ...]:
    cols = []
    for v, variant in enumerate(inst.variants):
        prefix = variant_prefix(v)
        cols.extend(FeatureColumn(f"{prefix}_{i + 1}", CATEGORICAL) for i in range(variant.num_tasks))
    cols.extend(FeatureColumn(f"WS_{j + 1}", NUMERIC) for j in range(inst.num_stations))
    cols.extend(FeatureColumn(f"Bu_{k + 1}", NUMERIC) for k in range(inst.num_buffers))
    return tuple(cols)


def feature_row(inst: ProblemInstance, cfg: RmsConfiguration) -> tuple:
    """Decision-variable vector of a configuration; stations are 1-based."""
    values: list[int] = []
    for v in range(inst.num_variants):
        values.extend(s + 1 for s in cfg.assignment[v])
    values.extend(cfg.resources_per_ws)
    values.extend(cfg.buffers)
    return tuple(values)


def _archive_rows(archive, selection):
    """Deduplicate an archive's decodable solutions by chromosome."""
    seen: dict[tuple, int] = {}
    table_rows: list[tuple] = []
    mask: list[bool] = []
    for ind in archive.solutions.values():
        if ind.configuration is None:
            continue
        key = ind.chromosome.keys
        sel = ind.id in selection
        if key in seen:
            mask[seen[key]] = mask[seen[key]] or sel
        else:
            seen[key] = len(table_rows)
            table_rows.append(feature_row(archive.instance, ind.configuration))
            mask.append(sel)
    return table_rows, mask


def build_feature_table(archive, selection) -> FeatureTable:
    """One row per unique decodable solution; `selection` holds solution ids."""
    selection = set(selection)
    unknown = selection - set(archive.solutions)
    if unknown:
        raise ValueError(f"selection contains unknown solution ids: {sorted(unknown)[:5]}")
    rows, mask = _archive_rows(archive, selection)
    table = FeatureTable(feature_columns(archive.instance), rows, mask)
    if table.num_selected == 0:
        raise ValueError("selected set is empty")
    if table.num_selected == len(table.rows):
        raise ValueError("unselected set is empty")
    return table


def build_group_table(archives, selections) -> FeatureTable:
    """Concatenate per-archive rows (dedup is per archive: the same keys can
    decode differently under different scenarios)."""
    columns = feature_columns(archives[0].instance)
    for a in archives[1:]:
        if feature_columns(a.instance) != columns:
            raise ValueError("archives have incompatible decision variables")
    rows: list[tuple] = []
    mask: list[bool] = []
    for archive, selection in zip(archives, selections):
        r, m = _archive_rows(archive, set(selection))
        rows.extend(r)
        mask.extend(m)
    table = FeatureTable(columns, rows, mask)
    if table.num_selected == 0:
        raise ValueError("selected set is empty")
    if table.num_selected == len(table.rows):
        raise ValueError("unselected set is empty")
    return table


# ---------------------------------------------------------------------------
# mining


def evaluate_interaction(table: FeatureTable, rules) -> tuple[float, float]:
    """Exact (significance, unsignificance) of a conjunction by row counting."""
    rules = list(rules.rules) if isinstance(rules, RuleInteraction) else list(rules)
    for rule in rules:
        if rule.variable not in table.index:
            raise ValueError(f"unknown variable {rule.variable!r}")
    sel_hits = unsel_hits = sel_n = unsel_n = 0
    for row, sel in zip(table.rows, table.selected):
        ok = all(rule.matches(row[table.index[rule.variable]]) for rule in rules)
        if sel:
            sel_n += 1
            sel_hits += ok
        else:
            unsel_n += 1
            unsel_hits += ok
    return sel_hits / sel_n, unsel_hits / unsel_n


def _candidate_rules(table: FeatureTable):
    """Level-1 candidates from values observed in the selected set."""
    out: list[Rule] = []
    for col in table.columns:
        observed = sorted(set(table.column_values(col.name, selected_only=True)))
        for val in observed:
            out.append(Rule(col.name, "=", val))
            out.append(Rule(col.name, "!=", val))
        if col.kind == NUMERIC:
            for a, b in zip(observed, observed[1:]):
                mid = (a + b) / 2
                out.append(Rule(col.name, "<", mid))
                out.append(Rule(col.name, ">", mid))
    return out


def mine(table: FeatureTable, max_level: int = 5, min_significance: float = 0.9,
         max_candidates: int = 1_000_000) -> list[RuleInteraction]:
    """Apriori search for rule interactions discriminating the selected set.

    Interactions use at most one rule per variable.  A conjunction whose
    unsignificance is not below every immediate sub-conjunction's is
    redundant (the extra conjunct excluded no further unselected solutions)
    and is suppressed from the output.
    """
    if max_level < 1:
        raise ValueError("max_level must be >= 1")
    if not 0 < min_significance <= 1:
        raise ValueError("min_significance must be in (0, 1]")
    sel_mask = np.asarray(table.selected, dtype=bool)
    unsel_mask = ~sel_mask
    n_sel = int(sel_mask.sum())
    n_unsel = int(unsel_mask.sum())
    if n_sel == 0 or n_unsel == 0:
        raise ValueError("both selected and unselected sets must be non-empty")
    data = [np.asarray([row[i] for row in table.rows]) for i in range(len(table.columns))]

    examined = 0
    truncated = False

    def rule_mask(rule: Rule):
        col = data[table.index[rule.variable]]
        if rule.relation == "<":
            return col < rule.threshold
        if rule.relation == ">":
            return col > rule.threshold
        if rule.relation == "=":
            return col == rule.threshold
        return col != rule.threshold

    # level 1
    survivors: dict[tuple[Rule, ...], tuple] = {}
    level_rules: list[tuple[Rule, ...]] = []
    masks: dict[tuple[Rule, ...], np.ndarray] = {}
    for rule in _candidate_rules(table):
        examined += 1
        m = rule_mask(rule)
        sig = int((m & sel_mask).sum()) / n_sel
        if sig >= min_significance:
            key = (rule,)
            unsig = int((m & unsel_mask).sum()) / n_unsel
            survivors[key] = (sig, unsig)
            masks[key] = m
            level_rules.append(key)
    level_rules.sort(key=lambda rs: tuple(r.sort_key() for r in rs))

    all_levels: dict[tuple[Rule, ...], tuple] = dict(survivors)
    current = level_rules
    for level in range(2, max_level + 1):
        if truncated or not current:
            break
        nxt: list[tuple[Rule, ...]] = []
        for i in range(len(current)):
            if truncated:
                break
            for j in range(i + 1, len(current)):
                a, b = current[i], current[j]
                if a[:-1] != b[:-1]:
                    continue
                last_a, last_b = a[-1], b[-1]
                if last_a.variable == last_b.variable:
                    continue
                cand = tuple(sorted(a + (last_b,), key=Rule.sort_key))
                if cand in all_levels:
                    continue
                if any(
                    cand[:k] + cand[k + 1 :] not in all_levels for k in range(len(cand))
                ):
                    continue
                examined += 1
                if examined > max_candidates:
                    truncated = True
                    break
                m = masks[a] & rule_mask(last_b)
                sig = int((m & sel_mask).sum()) / n_sel
                if sig >= min_significance:
                    unsig = int((m & unsel_mask).sum()) / n_unsel
                    all_levels[cand] = (sig, unsig)
                    masks[cand] = m
                    nxt.append(cand)
        nxt.sort(key=lambda rs: tuple(r.sort_key() for r in rs))
        current = nxt
    if truncated:
        log.warning("mine: candidate cap %d reached, deeper interactions skipped", max_candidates)

    out = []
    for rules, (sig, unsig) in all_levels.items():
        if len(rules) > 1:
            redundant = any(
                all_levels[rules[:k] + rules[k + 1 :]][1] <= unsig
                for k in range(len(rules))
            )
            if redundant:
                continue
        out.append(RuleInteraction(rules, sig, unsig))
    out.sort(
        key=lambda ri: (
            ri.unsignificance,
            -ri.significance,
            ri.level,
            tuple(r.sort_key() for r in ri.rules),
        )
    )
    return out


# ---------------------------------------------------------------------------
# scenario groups


@dataclass
class GroupReport:
    label: str
    archives: int
    selected: int
    unselected: int
    interactions: list[RuleInteraction] = field(default_factory=list)


def _mix_label(mix) -> str:
    return "/".join(str(int(round(p * 100))) for p in mix.proportions)


def mine_scenario_groups(archives, grouping: str, max_level: int = 5,
                         min_significance: float = 0.9,
                         max_candidates: int = 1_000_000) -> list[GroupReport]:
    """Mine merged scenario groups: selected = union of final fronts.

    grouping is "operators" (by total resource count) or "proportion"
    (by production mix).
    """
    if grouping == "operators":
        key_of = lambda a: ("NO", a.instance.total_resources)
        label_of = lambda a: f"NO={a.instance.total_resources}"
    elif grouping == "proportion":
        key_of = lambda a: ("mix", _mix_label(a.instance.mix))
        label_of = lambda a: _mix_label(a.instance.mix)
    else:
        raise ValueError(f"unknown grouping {grouping!r}")
    groups: dict = {}
    for a in archives:
        groups.setdefault(key_of(a), []).append(a)
    reports = []
    for key in sorted(groups, key=str):
        members = groups[key]
        selections = [set(a.final_front) for a in members]
        try:
            table = build_group_table(members, selections)
        except ValueError as exc:
            log.warning("group %s skipped: %s", key, exc)
            continue
        interactions = mine(table, max_level, min_significance, max_candidates)
        reports.append(
            GroupReport(
                label=label_of(members[0]),
                archives=len(members),
                selected=table.num_selected,
                unselected=len(table.rows) - table.num_selected,
                interactions=interactions,
            )
        )
    return reports


def format_report(reports, limit: int | None = 20) -> str:
    """Human-readable rule tables (rule text, Sig., Unsig.)."""
    lines = []
    for rep in reports:
        lines.append(f"== {rep.label}  ({rep.archives} archive(s), "
                     f"{rep.selected} selected / {rep.unselected} unselected)")
        lines.append(f"{'Rule-interaction':<72} {'Sig.':>8} {'Unsig.':>8}")
        shown = rep.interactions if limit is None else rep.interactions[:limit]
        for ri in shown:
            lines.append(
                f"{ri.text():<72} {100 * ri.significance:>7.2f}% {100 * ri.unsignificance:>7.2f}%"
            )
        if limit is not None and len(rep.interactions) > limit:
            lines.append(f"... {len(rep.interactions) - limit} more")
        lines.append("")
    return "\n".join(lines)
