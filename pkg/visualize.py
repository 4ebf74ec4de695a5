#!/usr/bin/env python3
"""
Charts of reproduce tables: measured ratio against the checked bound, one bar pair per row
"""
import os

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd
import seaborn as sns

from report_log import progress


def ratio_frame(rows):
    """Long-form frame of rows that carry both a measured ratio and a bound."""
    records = []
    for row in rows:
        if row.measured is None or row.bound is None:
            continue
        records.append({"instance": row.instance, "series": "measured", "value": float(row.measured)})
        records.append({"instance": row.instance, "series": "bound", "value": float(row.bound)})
    return pd.DataFrame.from_records(records, columns=["instance", "series", "value"])


def save_ratio_chart(rows, title, filename):
    df = ratio_frame(rows)
    if df.empty:
        progress(f"  No ratio rows to plot for {title}")
        return None

    sns.set_style("whitegrid")
    n_instances = df["instance"].nunique()
    plt.figure(figsize=(max(6, 0.4 * n_instances), 5))
    ax = sns.barplot(data=df, x="instance", y="value", hue="series",
                     palette=sns.color_palette("Set1", 2))
    ax.set_title(title, fontsize=12, fontweight='medium')
    ax.set_xlabel('Instance', fontsize=11)
    ax.set_ylabel('Ratio', fontsize=11)
    ax.tick_params(axis='x', labelrotation=90, labelsize=7)
    sns.despine(ax=ax)

    directory = os.path.dirname(filename)
    if directory:
        os.makedirs(directory, exist_ok=True)
    plt.tight_layout()
    plt.savefig(filename, format='pdf', bbox_inches='tight', facecolor='white', edgecolor='none')
    plt.close()
    sns.reset_defaults()
    progress(f"  Saved: {filename}")
    return filename
