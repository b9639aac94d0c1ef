"""Walk through the per-clip feature extraction on synthetic audio.

Builds two clips, a 440 Hz tone and white noise, and prints their 28-slot
feature vectors side by side so you can see which spectral properties tell
them apart before any classifier gets involved.
"""

import numpy as np

from vocalnet.audio_io import AudioClip
from vocalnet.features import FEATURE_NAMES, extract_features

RATE = 22050
DURATION = 1.0

rng = np.random.default_rng(0)
t = np.arange(int(RATE * DURATION)) / RATE

tone = AudioClip(0.6 * np.sin(2 * np.pi * 440 * t), RATE, "tone440")
noise = AudioClip(np.clip(0.3 * rng.standard_normal(len(t)), -1, 1), RATE, "noise")

tone_vector = extract_features(tone)
noise_vector = extract_features(noise)

print(f"{'slot':<30} {'440 Hz tone':>14} {'white noise':>14}")
for name, a, b in zip(FEATURE_NAMES, tone_vector.values, noise_vector.values):
    print(f"{name:<30} {a:>14.4f} {b:>14.4f}")

print()
print("Things worth noticing:")
print(" - the tone's spectral_centroid_mean sits near 440 Hz; the noise's is")
print("   near the middle of the band")
print(" - zero_crossings_mean for a 440 Hz tone in a 512-sample window at")
print(f"   22050 Hz is about 2*440*512/22050 = {2*440*512/22050:.1f}")
print(" - compactness (noisiness) is much higher for the noise clip")
