# coding=utf-8
# --------------------------------------------------------------------------------------------
# Copyright (c) softcp contributors. All rights reserved.
# Licensed under the MIT License. See License.txt in the project root for license information.
# --------------------------------------------------------------------------------------------
"""
Help definitions for CLI.
"""

from knack.help_files import helps


helps['augment'] = """
    type: command
    short-summary: Generate a synthetic dataset with soft copy-paste.
    long-summary: |
                  Each sample draws a background and a lesion, transforms both, places the lesion so
                  it intersects the reference class without touching other lesions, blends it and
                  merges the labels. Writes images/, masks/ and manifest.jsonl under the output root.
                  Sample i depends only on the seed and i, so the output is identical for any --jobs.
    examples:
    - name: Generate at the configured ratio
      text: >
        softcp augment --config run.yaml
    - name: Generate 100 samples with hard paste on 4 workers
      text: >
        softcp augment -c run.yaml --count 100 --blend hard --jobs 4
    - name: Generate one synthetic image per two real images with a fixed seed
      text: >
        softcp augment -c run.yaml --ratio 2:1 --seed 7 --out ./out-seed7
"""

helps['preview'] = """
    type: command
    short-summary: Render blend comparison grids for a few sample indices.
    long-summary: |
                  One PNG per index under <output_root>/preview. Rows are the soft, hard, gaussian
                  and poisson blends; columns are the background, the weight map as a heatmap and the
                  composite. The configured blend row matches what augment writes for the same seed.
    examples:
    - name: Preview the first four samples
      text: >
        softcp preview -c run.yaml
    - name: Preview samples 10 to 14 for seed 3
      text: >
        softcp preview -c run.yaml --seed 3 --start-index 10 --count 5
"""

helps['extract-lesions'] = """
    type: command
    short-summary: Write the lesion bank as patch/mask PNG pairs.
    examples:
    - name: Extract lesions to the default location
      text: >
        softcp extract-lesions -c run.yaml
"""

helps['validate'] = """
    type: command
    short-summary: Re-check a generated batch against its manifest.
    long-summary: |
                  Replays every background label map, re-checks both placement constraints for each
                  stored lesion mask and offset, and compares the merged labels with the written mask.
                  Exits with status 1 when any violation is found.
    examples:
    - name: Validate a batch
      text: >
        softcp validate --manifest out/manifest.jsonl
"""

helps['eval'] = """
    type: command
    short-summary: Score predicted masks against ground truth per class (DSC, IoU, accuracy).
    examples:
    - name: Score a kidney/tumor prediction set and write a CSV
      text: >
        softcp eval --pred-dir preds --truth-dir truth --classes "0=0;128=1;255=2" --out scores.csv
"""

helps['init-config'] = """
    type: command
    short-summary: Write the commented default run configuration.
    examples:
    - name: Create run.yaml
      text: >
        softcp init-config --out run.yaml
"""
