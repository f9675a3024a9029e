/**
 * Console view state as a pure reducer.
 *
 * The console holds no authority: every rule (lock, deadline, fallback)
 * lives server-side, so this store only mirrors server events plus local
 * clock ticks. Duplicate deliveries are suppressed by sequence number.
 */

import { WireMessage } from "./protocol.js";

export const LOCK_TEXT = "Please type the response if you can!";

export const DEFAULT_RESPONSES: readonly string[] = [
  "Yes, I agree.",
  "No, I don't think so.",
  "Could you repeat that again?",
  "I am thinking about it. Could you provide more information?",
];

export const ALTERNATIVE_COLORS: readonly string[] = ["green", "blue", "yellow"];

export interface ConsoleConfig {
  workerBudgetMs: number;
  suggestionLockMs: number;
  maxAlternatives: number;
  maxSuggestions: number;
}

export const DEFAULT_CONFIG: ConsoleConfig = {
  workerBudgetMs: 25_000,
  suggestionLockMs: 5_000,
  maxAlternatives: 3,
  maxSuggestions: 20,
};

export interface Variant {
  text: string;
  distance: number | null;
  color: string | null;
}

export interface SuggestionButton {
  text: string;
  variantIndex: number;
  buttonIndex: number;
}

export interface HistoryEntry {
  turnId: string;
  userText: string;
  responseText: string;
  responseKind: string;
}

export interface ConsoleState {
  connected: boolean;
  skillOpen: boolean;
  sessionId: string | null;
  turnId: string | null;
  turnOpenedAtMs: number | null;
  variants: Variant[];
  selectedVariant: number;
  suggestions: SuggestionButton[];
  draft: string;
  memo: string;
  countdownMs: number | null;
  lockRemainingMs: number;
  unlocked: boolean;
  history: HistoryEntry[];
  notices: string[];
  lastResponse: string | null;
  lastCue: string | null;
  lastSeq: number;
}

export type Action =
  | { kind: "server"; msg: WireMessage }
  | { kind: "tick"; nowMs: number }
  | { kind: "draft"; text: string }
  | { kind: "memo"; text: string }
  | { kind: "clickTranscript"; index: number }
  | { kind: "connected" }
  | { kind: "disconnected" };

export function initialState(): ConsoleState {
  return {
    connected: false,
    skillOpen: false,
    sessionId: null,
    turnId: null,
    turnOpenedAtMs: null,
    variants: [],
    selectedVariant: 0,
    suggestions: [],
    draft: "",
    memo: "",
    countdownMs: null,
    lockRemainingMs: 0,
    unlocked: false,
    history: [],
    notices: [],
    lastResponse: null,
    lastCue: null,
    lastSeq: -1,
  };
}

export function suggestionsDisabled(state: ConsoleState): boolean {
  return state.lockRemainingMs > 0;
}

export function lockText(state: ConsoleState): string | null {
  return suggestionsDisabled(state) ? LOCK_TEXT : null;
}

export function countdownSeconds(state: ConsoleState): number | null {
  return state.countdownMs === null ? null : Math.max(0, Math.ceil(state.countdownMs / 1000));
}

function clearTurn(state: ConsoleState): void {
  state.turnId = null;
  state.turnOpenedAtMs = null;
  state.variants = [];
  state.selectedVariant = 0;
  state.suggestions = [];
  state.draft = "";
  state.countdownMs = null;
  state.lockRemainingMs = 0;
  state.unlocked = false;
}

function applyServer(state: ConsoleState, msg: WireMessage, cfg: ConsoleConfig): void {
  if (msg.seq <= state.lastSeq) {
    return; // duplicate or out-of-order redelivery
  }
  state.lastSeq = msg.seq;
  switch (msg.type) {
    case "skill_open": {
      state.skillOpen = true;
      state.sessionId = msg.session_id;
      break;
    }
    case "transcript_bundle": {
      const original = String(msg.payload.original ?? "");
      const alts = (msg.payload.alternatives as { text: string; distance: number }[] | undefined) ?? [];
      state.turnId = msg.turn_id;
      state.turnOpenedAtMs = msg.at;
      state.variants = [
        { text: original, distance: null, color: null },
        ...alts.slice(0, cfg.maxAlternatives).map((alt, i) => ({
          text: alt.text,
          distance: alt.distance,
          color: ALTERNATIVE_COLORS[i] ?? null,
        })),
      ];
      state.selectedVariant = 0;
      state.suggestions = [];
      state.draft = "";
      state.unlocked = false;
      state.countdownMs = cfg.workerBudgetMs;
      state.lockRemainingMs = cfg.suggestionLockMs;
      state.lastResponse = null;
      break;
    }
    case "suggestion": {
      if (msg.turn_id !== state.turnId || state.suggestions.length >= cfg.maxSuggestions) {
        break;
      }
      state.suggestions.push({
        text: String(msg.payload.text ?? ""),
        variantIndex: Number(msg.payload.variant_index ?? 0),
        buttonIndex: Number(msg.payload.button_index ?? state.suggestions.length),
      });
      break;
    }
    case "cue": {
      const kind = String(msg.payload.kind ?? "");
      state.lastCue = kind;
      if (kind === "suggestions_unlocked" && msg.turn_id === state.turnId) {
        state.unlocked = true;
        state.lockRemainingMs = 0;
      }
      break;
    }
    case "system_response": {
      if (msg.turn_id === state.turnId && state.turnId !== null) {
        const selected = Number(msg.payload.selected_transcript ?? 0);
        const variant = state.variants[selected] ?? state.variants[0];
        state.history.push({
          turnId: state.turnId,
          userText: variant ? variant.text : "",
          responseText: String(msg.payload.text ?? ""),
          responseKind: String(msg.payload.response_kind ?? ""),
        });
        state.lastResponse = String(msg.payload.text ?? "");
        clearTurn(state);
      }
      break;
    }
    case "skill_close": {
      state.skillOpen = false;
      clearTurn(state);
      break;
    }
    case "error": {
      const message = String(msg.payload.message ?? "error");
      const remaining = msg.payload.remaining_lock_ms;
      const text = typeof remaining === "number" ? `${message} (${(remaining / 1000).toFixed(1)} s left)` : message;
      state.notices.push(text);
      if (state.notices.length > 5) {
        state.notices.shift();
      }
      break;
    }
    default:
      break;
  }
}

function applyTick(state: ConsoleState, nowMs: number, cfg: ConsoleConfig): void {
  if (state.turnOpenedAtMs === null) {
    return;
  }
  state.countdownMs = Math.max(0, state.turnOpenedAtMs + cfg.workerBudgetMs - nowMs);
  if (!state.unlocked) {
    state.lockRemainingMs = Math.max(0, state.turnOpenedAtMs + cfg.suggestionLockMs - nowMs);
  }
}

export class ConsoleStore {
  state: ConsoleState;
  readonly config: ConsoleConfig;
  private listeners: ((state: ConsoleState) => void)[] = [];

  constructor(config: Partial<ConsoleConfig> = {}) {
    this.config = { ...DEFAULT_CONFIG, ...config };
    this.state = initialState();
  }

  subscribe(listener: (state: ConsoleState) => void): void {
    this.listeners.push(listener);
  }

  dispatch(action: Action): void {
    const state = this.state;
    switch (action.kind) {
      case "server":
        applyServer(state, action.msg, this.config);
        break;
      case "tick":
        applyTick(state, action.nowMs, this.config);
        break;
      case "draft":
        state.draft = action.text;
        break;
      case "memo":
        state.memo = action.text;
        break;
      case "clickTranscript":
        if (action.index >= 0 && action.index < state.variants.length) {
          state.selectedVariant = action.index;
        }
        break;
      case "connected":
        state.connected = true;
        break;
      case "disconnected":
        state.connected = false;
        break;
    }
    for (const listener of this.listeners) {
      listener(state);
    }
  }
}
