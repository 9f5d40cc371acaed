"""From a password to a scrambled recording and back.

Walks through the digit pipeline for one password, encrypts a synthetic
utterance, and shows what a one-character password typo does to the
decryption.

    python3 demos/01_keys_and_cipher.py
"""

import numpy as np

from voicecrypt import decrypt, derive_keys, encrypt, mse
from voicecrypt.keys import ascii_encode, caesar_shift, validate_password
from voicecrypt.synth import synthetic_voice

password = "Djyot!24"
codes = ascii_encode(validate_password(password))
print(f"password         {password}")
print(f"character codes  {codes}")
print(f"shifted by 4     {caesar_shift(codes)}")

keys = derive_keys(password)
print(f"digit string     {keys.z_digits}")
print(f"key1 / key2      {keys.key1_digits} / {keys.key2_digits}\n")

voice = synthetic_voice(140.0, duration=1.0, seed=7)
cipher = encrypt(voice, keys, gain=1.0)
power = np.mean(voice.samples**2)
print(f"plaintext power  {power:.4f}")
print(f"ciphertext power {np.mean(cipher.coefficients**2):.4f}")
print(f"plaintext/ciphertext correlation {np.corrcoef(voice.samples, cipher.coefficients)[0, 1]:+.4f}")

back = decrypt(cipher, keys)
print(f"\nright password: mse = {mse(back.samples, voice.samples):.2e}")

typo = derive_keys("Djyot!25")
garbled = decrypt(cipher, typo)
print(f"one-character typo: mse = {mse(garbled.samples, voice.samples):.3f} "
      f"({mse(garbled.samples, voice.samples) / power:.0f}x the signal power)")
