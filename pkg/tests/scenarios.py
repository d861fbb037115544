"""Pinned synthetic scenarios shared by the unit and acceptance tests."""

from tempograph.synth import Burst, GeneratorConfig
from tempograph.windows import DAY, HOUR, SlidingSchedule

BURST_DAYS = (25, 38, 51, 64, 77)


def burst_config(seed=3):
    """A small population that is fully seen after a few weeks, plus five
    twelve-hour bursts of 120 newcomers each."""
    return GeneratorConfig(
        n_users=1500,
        duration=90 * DAY,
        base_rate=15.0,
        diurnal_amplitude=4.0,
        hub_fraction=0.002,
        hub_attention=0.1,
        stranger_prob=0.5,
        bursts=tuple(Burst(d * DAY + 6 * HOUR, 12 * HOUR, 1.0, 120) for d in BURST_DAYS),
        seed=seed,
        pool_size=60,
    )


def burst_schedule(cfg):
    """Daily tumbling windows from day 20 (past warm-up) to the end."""
    s = cfg.start
    return SlidingSchedule(DAY, DAY, s + 20 * DAY + DAY // 2, s + 89 * DAY + DAY // 2)


def hub_config(seed, days=1, hub_attention=0.3):
    """One dominant hub among quiet users."""
    return GeneratorConfig(
        n_users=300,
        duration=days * DAY,
        base_rate=20.0,
        diurnal_amplitude=2.0,
        hub_fraction=1 / 300,
        hub_attention=hub_attention,
        stranger_prob=0.9,
        seed=seed,
        pool_size=40,
    )


def million_config(seed=11):
    """About one million events over 17,000 hours."""
    return GeneratorConfig(
        n_users=200_000,
        duration=17_000 * HOUR,
        base_rate=9.1,
        diurnal_amplitude=12.0,
        population_mix=((0.6, 0), (0.4, 6 * HOUR)),
        hub_fraction=0.0001,
        hub_attention=0.05,
        stranger_prob=0.6,
        seed=seed,
        pool_size=40,
        session_mean=1.5 * HOUR,
    )
