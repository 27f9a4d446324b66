/**
 * Lightweight deterministic annotation models.
 *
 * These are rule-based stand-ins with the same request/response contracts
 * as learned models. Outputs are stable across runs for a given input,
 * which is what the conformance fixtures pin down; swap in heavier models
 * behind the same interfaces and regenerate the fixtures.
 */

export interface EntitySpan {
  start: number;
  end: number;
  label: string;
  text: string;
}

export interface NliResult {
  label: "entailment" | "neutral" | "contradiction";
  probs: [number, number, number];
}

interface WordToken {
  text: string;
  start: number;
  end: number;
}

const WORD_RE = /[\p{L}\p{N}][\p{L}\p{N}'’-]*/gu;

/** Unicode word tokens with character offsets into the original text. */
export function wordTokens(text: string): WordToken[] {
  const out: WordToken[] = [];
  for (const m of text.matchAll(WORD_RE)) {
    out.push({ text: m[0], start: m.index, end: m.index + m[0].length });
  }
  return out;
}

const SENTENCE_INITIAL_SKIP = new Set([
  "The", "A", "An", "In", "On", "At", "It", "He", "She", "They", "We",
  "This", "That", "These", "Those", "There", "When", "While", "After",
  "Before", "But", "And", "Or", "So", "If", "As", "By", "For", "From",
  "To", "With", "Its", "His", "Her", "Their", "Our", "My", "You", "I",
]);

function isCapitalized(word: string): boolean {
  const first = word[0];
  return first !== undefined && first !== first.toLowerCase() && first === first.toUpperCase();
}

function sentenceInitial(text: string, start: number): boolean {
  for (let i = start - 1; i >= 0; i -= 1) {
    const ch = text[i];
    if (ch === " " || ch === "\t" || ch === "\n" || ch === "\r" || ch === '"' || ch === "'" || ch === "’" || ch === "(") continue;
    return ch === "." || ch === "!" || ch === "?";
  }
  return true;
}

/**
 * Named entity recognition by merging consecutive capitalized word runs.
 *
 * A run of capitalized tokens separated only by spaces becomes one span.
 * A single capitalized function word at a sentence start is discarded so
 * ordinary sentence case does not produce an entity. Spans always satisfy
 * 0 <= start < end <= text.length and text.slice(start, end) === span text.
 */
export function recognizeEntities(text: string): EntitySpan[] {
  const tokens = wordTokens(text);
  const spans: EntitySpan[] = [];
  let i = 0;
  while (i < tokens.length) {
    if (!isCapitalized(tokens[i].text)) {
      i += 1;
      continue;
    }
    let j = i;
    while (
      j + 1 < tokens.length &&
      isCapitalized(tokens[j + 1].text) &&
      /^ +$/.test(text.slice(tokens[j].end, tokens[j + 1].start))
    ) {
      j += 1;
    }
    const runLength = j - i + 1;
    const skip =
      runLength === 1 &&
      SENTENCE_INITIAL_SKIP.has(tokens[i].text) &&
      sentenceInitial(text, tokens[i].start);
    if (!skip) {
      const start = tokens[i].start;
      const end = tokens[j].end;
      spans.push({ start, end, label: "ENT", text: text.slice(start, end) });
    }
    i = j + 1;
  }
  return spans;
}

const NLI_STOPWORDS = new Set([
  "a", "an", "the", "is", "was", "are", "were", "be", "been", "being",
  "of", "in", "on", "at", "to", "for", "and", "or", "it", "its", "this",
  "that", "he", "she", "they", "his", "her", "their", "with", "by", "as",
  "has", "have", "had", "do", "does", "did", "s",
]);

const NEGATIONS = new Set(["not", "no", "never", "n't", "nt", "cannot"]);

function contentWords(text: string): Set<string> {
  const words = new Set<string>();
  for (const tok of wordTokens(text.toLowerCase().replace(/’/g, "'"))) {
    const bare = tok.text.replace(/'/g, "");
    if (!NLI_STOPWORDS.has(bare) && !NEGATIONS.has(bare)) words.add(bare);
  }
  return words;
}

function premiseCovers(premise: Set<string>, word: string): boolean {
  if (premise.has(word)) return true;
  // bare-plural tolerance so "span" still matches "spans"
  if (premise.has(word + "s")) return true;
  if (word.endsWith("s") && premise.has(word.slice(0, -1))) return true;
  return false;
}

function hasNegation(text: string): boolean {
  for (const tok of wordTokens(text.toLowerCase())) {
    if (NEGATIONS.has(tok.text) || tok.text.endsWith("n't")) return true;
  }
  return false;
}

/**
 * Entailment by content-word containment.
 *
 * If every content word of the hypothesis appears in the premise and the
 * two sides agree on negation, the premise entails the hypothesis. A
 * negation mismatch with high overlap reads as contradiction; anything
 * else is neutral. Probabilities are a fixed simplex per outcome so the
 * label always equals the argmax and the vector sums to one exactly.
 */
export function classifyNli(premise: string, hypothesis: string): NliResult {
  const p = contentWords(premise);
  const h = contentWords(hypothesis);
  let contained = 0;
  for (const w of h) if (premiseCovers(p, w)) contained += 1;
  const coverage = h.size === 0 ? 1 : contained / h.size;
  const negFlip = hasNegation(premise) !== hasNegation(hypothesis);
  if (coverage === 1 && !negFlip) {
    return { label: "entailment", probs: [0.9, 0.08, 0.02] };
  }
  if (coverage >= 0.6 && negFlip) {
    return { label: "contradiction", probs: [0.03, 0.12, 0.85] };
  }
  return { label: "neutral", probs: [0.05, 0.9, 0.05] };
}

export const EMBED_DIM = 64;

function fnv1a(s: string): number {
  let h = 0x811c9dc5;
  for (let i = 0; i < s.length; i += 1) {
    h ^= s.charCodeAt(i);
    h = Math.imul(h, 0x01000193) >>> 0;
  }
  return h >>> 0;
}

/**
 * Character-trigram hashing embedding, L2-normalized, 64 dimensions.
 * Deterministic: the same text maps to the same vector in every process.
 */
export function embedText(text: string): number[] {
  const vec = new Float64Array(EMBED_DIM);
  const padded = `^${text.toLowerCase()}$`;
  if (padded.length < 3) {
    vec[0] = 1;
    return Array.from(vec);
  }
  for (let i = 0; i + 3 <= padded.length; i += 1) {
    const tri = padded.slice(i, i + 3);
    const h = fnv1a(tri);
    const idx = h % EMBED_DIM;
    const sign = (h >>> 7) % 2 === 0 ? 1 : -1;
    vec[idx] += sign;
  }
  let norm = 0;
  for (let d = 0; d < EMBED_DIM; d += 1) norm += vec[d] * vec[d];
  norm = Math.sqrt(norm);
  if (norm === 0) {
    vec[0] = 1;
    return Array.from(vec);
  }
  const out = new Array<number>(EMBED_DIM);
  for (let d = 0; d < EMBED_DIM; d += 1) out[d] = vec[d] / norm;
  return out;
}

const AUX_VERBS = new Set([
  "is", "was", "are", "were", "am", "be", "been", "being", "has", "have",
  "had", "does", "do", "did", "can", "could", "will", "would", "shall",
  "should", "may", "might", "must", "went", "goes", "said", "says",
]);

function looksVerbal(word: string): boolean {
  const w = word.toLowerCase();
  if (AUX_VERBS.has(w)) return true;
  if (w.length > 3 && (w.endsWith("ed") || w.endsWith("ing"))) return true;
  if (w.length > 4 && w.endsWith("es")) return true;
  return false;
}

export interface RootResult {
  rootIndex: number;
  tokens: string[];
}

/**
 * Pick a root token index for a sentence: the first token after the
 * initial position that looks like a verb, else the middle token. The
 * index is always within bounds for any non-empty token sequence.
 */
export function findRoot(text: string): RootResult | null {
  const tokens = wordTokens(text).map((t) => t.text);
  if (tokens.length === 0) return null;
  for (let i = 1; i < tokens.length; i += 1) {
    if (looksVerbal(tokens[i])) return { rootIndex: i, tokens };
  }
  if (tokens.length === 1 && looksVerbal(tokens[0])) return { rootIndex: 0, tokens };
  return { rootIndex: Math.floor(tokens.length / 2), tokens };
}
