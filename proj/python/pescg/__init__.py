"""Periodic timetabling solvers on time-expanded networks."""

from pescg._pescg import (  # noqa: F401
    EventActivityNetwork,
    ExpandedNetwork,
    ODMatrix,
    SolverError,
    branch_and_price,
    builtin_instance,
    builtin_od,
    colgen,
    contract_degree2,
    cxpesp_lp_full,
    expand,
    lp_equality_check,
    make_transfers_free,
    parse_instance,
    parse_od,
    pesp_bruteforce,
    pesp_exact,
    pesp_lp_value,
    serialize_od,
    ttp_shortest_path_bound,
    xpesp_lp_value,
)
