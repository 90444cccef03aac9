#!/usr/bin/env python3
"""Generator for data/swiss_fixture.csv.

Synthetic surrogate for the Swiss municipalities population register used in
the survey-stratification literature: 2,896 municipalities in 7 regions with
heavy-tailed size variables and the published column roles (region, forest
surface, building surface, population/area plus categorical bins).

Structure: municipalities sit on a size gradient (bands) crossed with an
urban/rural mix axis. Forest surface loads negatively on the mix, building
surface positively, so in target space the size bands are elongated along the
mix direction. Population and polygon area load on the mix with opposite
signs, which lets the two categorical bins jointly localise a municipality's
band and mix. Values are synthetic; the file is committed and this script is
kept so the fixture can be regenerated or re-derived.

Usage: python3 make_swiss_fixture.py > swiss_fixture.csv
"""

import math
import random

SEED = 20250824
REGION_SIZES = [589, 913, 321, 171, 471, 186, 245]  # sums to 2,896
BINS = 18
BANDS = 6

BAND_GAP = 0.82      # log-space gap between size bands (diagonal direction)
MIX_SPREAD = 1.00    # sd of the urban/rural mix within a band
TARGET_MIX = 0.80    # mix loading on the two targets (opposite signs)
JITTER = 0.06        # residual log noise on the targets
POP_MIX = 0.55       # mix loading on population (urban: more people)
AREA_MIX = -0.50     # mix loading on polygon area (rural: more land)
SIZE_NOISE = 0.16    # residual log noise on population/area


def quantile_bins(values, bins):
    ranked = sorted(range(len(values)), key=lambda i: (values[i], i))
    labels = [0] * len(values)
    for rank, idx in enumerate(ranked):
        labels[idx] = min(bins - 1, rank * bins // len(values))
    return labels


def main():
    rng = random.Random(SEED)
    rows = []
    com = 0
    for region, size in enumerate(REGION_SIZES, start=1):
        bois_base = rng.uniform(2.6, 3.2)
        airbat_base = rng.uniform(2.2, 2.8)
        pop_base = rng.uniform(5.4, 6.0)
        area_base = rng.uniform(4.4, 5.0)
        # Band weights: small municipalities dominate the register.
        weights = [math.exp(-0.55 * b) for b in range(BANDS)]
        wsum = sum(weights)
        for _ in range(size):
            com += 1
            pick = rng.uniform(0.0, wsum)
            band = 0
            for b, w in enumerate(weights):
                pick -= w
                if pick <= 0.0:
                    band = b
                    break
            mix = rng.gauss(0.0, MIX_SPREAD)
            if rng.random() < 0.15:  # resort towns, forest communes, enclaves
                mix += (1 if rng.random() < 0.5 else -1) * rng.uniform(3.0, 6.0) * MIX_SPREAD
            drift = rng.gauss(0.0, 0.18)  # within-band size drift
            sizepos = band + drift
            if band == BANDS - 1 and rng.random() < 0.25:  # metropolitan tail
                sizepos += rng.uniform(0.5, 1.6)

            log_bois = bois_base + BAND_GAP * sizepos - TARGET_MIX * mix + rng.gauss(0.0, JITTER)
            log_airbat = airbat_base + BAND_GAP * sizepos + TARGET_MIX * mix + rng.gauss(0.0, JITTER)
            log_pop = pop_base + 0.80 * sizepos + POP_MIX * mix + rng.gauss(0.0, SIZE_NOISE)
            log_area = area_base + 0.70 * sizepos + AREA_MIX * mix + rng.gauss(0.0, SIZE_NOISE)

            pop = max(25, int(round(math.exp(log_pop))))
            rows.append([region, com, pop, math.exp(log_area), math.exp(log_bois),
                         math.exp(log_airbat)])

    pop_cat = quantile_bins([r[2] for r in rows], BINS)
    area_cat = quantile_bins([r[3] for r in rows], BINS)

    print("REG,COM,POPTOT,HApoly,Surfacesbois,Airbat,POPTOT.cat,Hapoly.cat")
    for i, (region, com, pop, area, bois, airbat) in enumerate(rows):
        print(
            f"{region},{com},{pop},{area:.2f},{bois:.2f},{airbat:.2f},"
            f"c{pop_cat[i] + 1:02d},c{area_cat[i] + 1:02d}"
        )


if __name__ == "__main__":
    main()
