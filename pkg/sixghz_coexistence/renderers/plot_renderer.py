"""
SVG figures of result tables.

CSV stays the canonical output; figures are a convenience for reading a run.
"""

import io
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

# Stable element ids and no timestamp, so identical runs write identical files
matplotlib.rcParams["svg.hashsalt"] = "sixghz-coexistence"
SVG_METADATA = {"Date": None}

TIER_COLORS = {"cellular": "#366092", "wifi": "#FF9800"}
BAND_STYLES = {"unlicensed": "-", "licensed": "--"}


class PlotRenderer:
    """Renderer SVG for coverage curves, rate surfaces, game traces and study summaries."""

    def _render(self, fig):
        output = io.BytesIO()
        fig.savefig(output, format="svg", metadata=SVG_METADATA, bbox_inches="tight")
        plt.close(fig)
        return output.getvalue()

    def coverage(self, rows):
        """Analytic curves with Monte Carlo estimates and their 99% intervals."""
        fig, ax = plt.subplots(figsize=(7, 4.5))
        curves = defaultdict(list)
        for row in rows:
            curves[(row["tier"], row["band"])].append(row)
        for (tier, band), points in sorted(curves.items()):
            gamma = [p["gamma_db"] for p in points]
            color = TIER_COLORS.get(tier, "black")
            label = f"{tier}/{band}"
            ax.plot(
                gamma,
                [p["analytic"] for p in points],
                BAND_STYLES.get(band, "-"),
                color=color,
                label=f"{label} analytic",
            )
            estimates = [p for p in points if p.get("p_hat") is not None]
            if estimates:
                ax.errorbar(
                    [p["gamma_db"] for p in estimates],
                    [p["p_hat"] for p in estimates],
                    yerr=[p["ci99"] for p in estimates],
                    fmt="o",
                    markersize=3,
                    color=color,
                    label=f"{label} Monte Carlo",
                )
        ax.set_xlabel("SINR threshold (dB)")
        ax.set_ylabel("Coverage probability")
        ax.set_ylim(0, 1.02)
        ax.grid(alpha=0.3)
        ax.legend(fontsize=7)
        return self._render(fig)

    def rate_surface(self, rows):
        """One heat map per tier over the (delta_c, delta_w) grid."""
        tiers = sorted({row["tier"] for row in rows})
        fig, axes = plt.subplots(1, len(tiers), figsize=(5 * len(tiers), 4), squeeze=False)
        for ax, tier in zip(axes[0], tiers):
            points = [r for r in rows if r["tier"] == tier]
            xs = sorted({p["delta_c"] for p in points})
            ys = sorted({p["delta_w"] for p in points})
            grid = [[0.0] * len(xs) for _ in ys]
            for p in points:
                grid[ys.index(p["delta_w"])][xs.index(p["delta_c"])] = p["rate_mbps"]
            image = ax.imshow(
                grid,
                origin="lower",
                extent=(xs[0], xs[-1], ys[0], ys[-1]),
                aspect="auto",
                cmap="viridis",
            )
            fig.colorbar(image, ax=ax, label="Mbps")
            ax.set_title(f"{tier} datarate")
            ax.set_xlabel("delta_c")
            ax.set_ylabel("delta_w")
        return self._render(fig)

    def trace(self, records, n_entities):
        """Actions of every entity along the activations."""
        fig, (ax_c, ax_w) = plt.subplots(2, 1, figsize=(7, 5), sharex=True)
        for entity in range(n_entities):
            mine = [r for r in records if r["actor"] == entity]
            steps = [r["activation"] for r in mine]
            label = f"entity {entity + 1}"
            ax_c.step(steps, [r["delta_c_i"] for r in mine], where="post", label=label)
            ax_w.step(steps, [r["delta_w_i"] for r in mine], where="post", label=label)
        ax_c.set_ylabel("delta_c")
        ax_w.set_ylabel("delta_w")
        ax_w.set_xlabel("Activation")
        for ax in (ax_c, ax_w):
            ax.set_ylim(-0.05, 1.05)
            ax.grid(alpha=0.3)
        ax_c.legend(fontsize=7)
        return self._render(fig)

    def comparison(self, runs):
        """Entity-averaged datarates of both strategies, per run."""
        fig, ax = plt.subplots(figsize=(6, 4))
        keys = ["dbra_rate_c", "random_rate_c", "dbra_rate_w", "random_rate_w"]
        labels = ["D-BRA cellular", "RANDOM cellular", "D-BRA WiFi", "RANDOM WiFi"]
        ax.boxplot([[run[k] / 1e6 for run in runs] for k in keys])
        ax.set_xticks(range(1, len(labels) + 1), labels)
        ax.set_ylabel("Average datarate (Mbps)")
        ax.grid(alpha=0.3)
        return self._render(fig)

    def rate_coverage(self, rows):
        """Empirical rate coverage probability per tier and threshold pair."""
        fig, axes = plt.subplots(1, 2, figsize=(10, 4), squeeze=False)
        for ax, tier in zip(axes[0], ("cellular", "wifi")):
            curves = defaultdict(list)
            for row in rows:
                if row["tier"] == tier:
                    curves[(row["sigma_hat_c_mbps"], row["sigma_hat_w_mbps"])].append(row)
            for (sigma_c, sigma_w), points in sorted(curves.items()):
                ax.plot(
                    [p["rate_mbps"] for p in points],
                    [p["rcp"] for p in points],
                    label=f"{sigma_c:g}/{sigma_w:g} Mbps",
                )
            ax.set_title(f"{tier} rate coverage")
            ax.set_xlabel("Datarate (Mbps)")
            ax.set_ylabel("RCP")
            ax.grid(alpha=0.3)
            ax.legend(fontsize=7)
        return self._render(fig)
