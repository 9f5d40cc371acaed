"""How channel noise on the ciphertext turns into error in the recovered audio.

Noise is added to the scrambled DCT coefficients, never to the audio.
Both scrambling layers are exact subtractions and the transform is
orthonormal, so the noise passes through at the same power. Each extra
dB of SNR therefore removes a fixed fraction of the error, and log10(MSE)
falls by 0.1 per dB.

    python3 demos/02_channel_sweep.py
"""

import numpy as np

from voicecrypt import derive_keys, run_mse_sweep
from voicecrypt.synth import synthetic_voice

voice = synthetic_voice(120.0, duration=1.0, seed=1)
keys = derive_keys("Ab#12xyz")
snrs = [0, 4, 8, 12, 16, 17, 18, 19, 20, 30]

rows = run_mse_sweep(voice, keys, snrs, trials=20, seed0=1)
print(" SNR dB   mean MSE")
for snr, err in rows:
    bar = "#" * max(1, int(40 + 10 * np.log10(err)))
    print(f"{snr:7.1f}   {err:.3e}  {bar}")

x = np.array([r[0] for r in rows])
y = np.log10([r[1] for r in rows])
print(f"\nleast-squares slope of log10(MSE): {np.polyfit(x, y, 1)[0]:.4f} per dB")

(noiseless,) = run_mse_sweep(voice, keys, [float("inf")], trials=1)
print(f"noiseless channel: mse = {noiseless[1]:.1e}")
