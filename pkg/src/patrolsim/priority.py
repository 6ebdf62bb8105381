"""Report-priority maintenance: growth, BS contact bookkeeping, and handoff.

The priority grows by one per step away from the base station (clamped at
p_max), transfers with a discount eta when meeting a robot that contacted
the BS less recently, and resets to zero when every encountered robot has
fresher BS contact (the duty was entrusted). The handoff pair of these
rules partitions the swarm into reporters and explorers.
"""

from dataclasses import dataclass
from typing import Sequence, Tuple


@dataclass
class PriorityState:
    p: float = 0.0       # report priority p_n(t)
    bs_contact: int = 0  # last direct BS connection timestep, 0 if never


# inbox payload: (sender_id, is_bs, sender_p, sender_bs_contact)
Payload = Tuple[int, bool, float, int]


def update_report_priority(
    state: PriorityState,
    inbox: Sequence[Payload],
    connected_to_bs: bool,
    now: int,
    p_max: float,
    eta: float,
) -> PriorityState:
    """One priority update from the t-1 payloads of the t-1 neighbors.

    Senders fold in ascending id order (the update is order-sensitive). A BS
    sender refreshes the contact timestamp and counts as an update, so a
    robot sitting next to the BS never resets. Equal contact timestamps do
    not adopt. The result is capped at p_max * (1 + eta): a single handoff
    from inputs below the cap cannot exceed it, and the cap keeps stacked
    same-step handoffs from compounding past the documented bound.
    """
    p = state.p
    omega = state.bs_contact
    if not connected_to_bs:
        p = min(p_max, p + 1.0)
    if inbox:
        updated = False
        for _, is_bs, sender_p, sender_omega in sorted(inbox):
            if is_bs:
                omega = now
                updated = True
            elif sender_omega < omega:
                p = max(p, sender_p) + eta * min(p, sender_p)
                updated = True
        if not updated:
            p = 0.0
        p = min(p, p_max * (1.0 + eta))
    return PriorityState(p, omega)
