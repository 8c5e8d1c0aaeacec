"""Group chains over level structures: invariants and constructions.

The package models a descending chain of finite-index subgroups as a tower
of transitive permutation actions with equivariant projections, and computes
the associated invariants: faithful level quotients, discriminant towers,
Molino towers, kernel-word and holonomy searches, regularity classification,
stability evidence, SQA violation searches, and constructions that realize a
prescribed discriminant tower.
"""

__version__ = "0.1.0"

from .permgroup import (
    ORDER_CAP,
    GroupSizeError,
    NotABlockSystem,
    Permutation,
    PermutationGroup,
    GroupMap,
    orbit,
    stabilizer,
    induced_action,
    kernel_of_action,
    core_triviality_witness,
    closure_elements,
    cyclic_group,
    symmetric_group,
    alternating_group,
    direct_sum,
)
from .fpgroup import (
    Word,
    Presentation,
    CosetTable,
    WordSyntaxError,
    todd_coxeter,
    action_from_table,
    parse_word,
    format_word,
)
from .tower import (
    ChainTower,
    FiberPoint,
    ValidationReport,
    validate,
    act,
    truncate,
    rebase,
    cylinder,
)
from .invariants import (
    DiscriminantTower,
    AnalysisReport,
    core_quotient_tower,
    discriminant_tower,
    molino_tower,
    classify,
    stability_report,
    kernel_words,
    holonomy_test,
    kernel_vs_discriminant,
    sqa_violation_search,
    equivalence_probe,
    virtual_regularity_probe,
    virtual_regularity_scan,
    enumerate_normal_probes,
    group_fingerprint,
    analyze,
)
from .builders import (
    QuotientTowerSpec,
    LenstraCoreError,
    lenstra_chain,
    odometer,
    rt_klein,
    fp_tower,
    product_chain,
    alt_diagonal_chain,
    full_product_chain,
    free_tree_tower,
    free_tree_sqa_fixture,
    CATALOG,
)
