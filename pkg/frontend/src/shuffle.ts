/** Seeded display shuffling.
 *
 * Candidates arrive from the server in manifest order. To keep reviewers
 * from treating the first card as the likely answer, each session shows
 * them in a seeded random order. Everything here is pure so a recorded
 * seed reproduces the exact screen a reviewer saw.
 */

/** Small deterministic PRNG (mulberry32), uniform on [0, 1). */
export function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

/**
 * Fisher-Yates order for n cards: index is the display slot, value is the
 * manifest position shown there.
 */
export function shuffledOrder(n: number, seed: number): number[] {
  const order = Array.from({ length: n }, (_, i) => i);
  const rand = mulberry32(seed);
  for (let i = n - 1; i > 0; i--) {
    const j = Math.floor(rand() * (i + 1));
    const tmp = order[i];
    order[i] = order[j];
    order[j] = tmp;
  }
  return order;
}

/** Inverse mapping: manifest position to display slot. */
export function displaySlots(order: number[]): number[] {
  const inv = new Array<number>(order.length);
  order.forEach((manifest, slot) => {
    inv[manifest] = slot;
  });
  return inv;
}

/** 32-bit FNV-1a, for deriving per-question seeds from strings. */
export function hashString(s: string): number {
  let h = 0x811c9dc5;
  for (let i = 0; i < s.length; i++) {
    h ^= s.charCodeAt(i);
    h = Math.imul(h, 0x01000193);
  }
  return h >>> 0;
}

/**
 * Per-question shuffle seed. One session seed would repeat the same
 * permutation pattern on every question, so mix the question id in.
 */
export function questionSeed(sessionSeed: number, questionId: string): number {
  return (sessionSeed ^ hashString(questionId)) >>> 0;
}
