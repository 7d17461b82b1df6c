/**
 * Assistant session state and transitions, kept separate from the DOM so the
 * rules (when generation is allowed, how history grows, verdict/buffer
 * pairing) are testable without a browser.
 */

import type { CopywritingResult, ProductRef, Verdict } from "./api.js";

export type Candidate = {
  copy: string;
  verdict: Verdict;
  seed: number;
};

export type AssistantSession = {
  topic: string | null;
  products: ProductRef[];
  editBuffer: string;
  /** Verdict for the current edit buffer; null while a re-assess is pending. */
  verdict: Verdict | null;
  history: Candidate[];
  nextSeed: number;
};

export function emptySession(): AssistantSession {
  return {
    topic: null,
    products: [],
    editBuffer: "",
    verdict: null,
    history: [],
    nextSeed: 0,
  };
}

export function selectTopic(session: AssistantSession, topic: string): AssistantSession {
  if (session.topic === topic) return session;
  return { ...emptySession(), topic };
}

export function selectProducts(
  session: AssistantSession,
  products: ProductRef[],
): AssistantSession {
  return {
    ...session,
    products,
    editBuffer: "",
    verdict: null,
    history: [],
    nextSeed: 0,
  };
}

export function canGenerate(session: AssistantSession): boolean {
  return session.products.length >= 2;
}

/** Record a generation result: history grows, buffer and verdict update. */
export function applyGeneration(
  session: AssistantSession,
  result: CopywritingResult,
  seed: number,
): AssistantSession {
  const candidate: Candidate = { copy: result.copy, verdict: result.verdict, seed };
  return {
    ...session,
    editBuffer: result.copy,
    verdict: result.verdict,
    history: [...session.history, candidate],
    nextSeed: seed + 1,
  };
}

/** An edit invalidates the verdict until the debounced re-assess lands. */
export function applyEdit(session: AssistantSession, text: string): AssistantSession {
  if (text === session.editBuffer) return session;
  return { ...session, editBuffer: text, verdict: null };
}

export function applyVerdict(
  session: AssistantSession,
  forText: string,
  verdict: Verdict,
): AssistantSession {
  // ignore verdicts for stale buffer contents
  if (forText !== session.editBuffer) return session;
  return { ...session, verdict };
}

export function debounce<A extends unknown[]>(
  fn: (...args: A) => void,
  waitMs: number,
): (...args: A) => void {
  let timer: ReturnType<typeof setTimeout> | null = null;
  return (...args: A) => {
    if (timer !== null) clearTimeout(timer);
    timer = setTimeout(() => fn(...args), waitMs);
  };
}
