"""Figure rendering for reports (PNG files next to the delimited output)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .analysis import CrossLangReport, FrequencyProfile, LengthReport  # noqa: E402


def render_frequency_profile(profiles: list[FrequencyProfile], path) -> None:
    """Rank/frequency curves on log-log axes, one line per model."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for prof in profiles:
        counts = [c for _, c in prof.entries]
        ax.plot(range(1, len(counts) + 1), counts, label=prof.model_label)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("token rank")
    ax.set_ylabel("frequency")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_length_report(report: LengthReport, path) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    labels = [e.label for e in report.entries]
    values = [e.average_tokens for e in report.entries]
    bars = ax.bar(range(len(values)), values, color="#4878a8")
    for bar, entry in zip(bars, report.entries):
        ax.annotate(f"{entry.delta_pct:+.1f}%",
                    (bar.get_x() + bar.get_width() / 2, bar.get_height()),
                    ha="center", va="bottom", fontsize=8)
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels, rotation=20, ha="right", fontsize=8)
    ax.set_ylabel("average tokens / sequence")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_crosslang(report: CrossLangReport, path) -> None:
    """Per-token frequency in each language, with the rarity thresholds."""
    fig, ax = plt.subplots(figsize=(5, 5))
    floor = report.f_lo / 10 if report.f_lo > 0 else 0.01
    xs = [max(a, floor) for _, a, _ in report.per_token]
    ys = [max(b, floor) for _, _, b in report.per_token]
    ax.scatter(xs, ys, s=4, alpha=0.35, linewidths=0)
    ax.axvline(report.f_hi, color="k", lw=0.7, ls="--")
    ax.axhline(report.f_hi, color="k", lw=0.7, ls="--")
    ax.axvline(report.f_lo, color="k", lw=0.7, ls=":")
    ax.axhline(report.f_lo, color="k", lw=0.7, ls=":")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("frequency per million, corpus A")
    ax.set_ylabel("frequency per million, corpus B")
    ax.set_title(f"language-specific: "
                 f"{100 * report.language_specific_fraction:.1f}%",
                 fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
