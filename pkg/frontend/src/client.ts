/**
 * WebSocket glue between the relay's /console endpoint and the store.
 *
 * The WebSocket constructor is injectable so tests can run the client
 * against a stub server under Node with the `ws` package.
 */

import { ActionPayload, actionMessage, parseMessage } from "./protocol.js";
import { ConsoleStore } from "./state.js";

type WebSocketLike = {
  onopen: ((ev: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onclose: ((ev: unknown) => void) | null;
  send(data: string): void;
  close(): void;
};

type WebSocketCtor = new (url: string) => WebSocketLike;

export class ConsoleClient {
  private ws: WebSocketLike | null = null;

  constructor(
    private readonly url: string,
    private readonly store: ConsoleStore,
    private readonly wsCtor: WebSocketCtor = (globalThis as { WebSocket?: WebSocketCtor }).WebSocket!,
  ) {}

  connect(): Promise<void> {
    return new Promise((resolve, reject) => {
      let settled = false;
      const ws = new this.wsCtor(this.url);
      this.ws = ws;
      ws.onopen = () => {
        settled = true;
        this.store.dispatch({ kind: "connected" });
        resolve();
      };
      ws.onmessage = (ev) => {
        const msg = parseMessage(String(ev.data));
        if (msg !== null) {
          this.store.dispatch({ kind: "server", msg });
        }
      };
      ws.onclose = () => {
        this.store.dispatch({ kind: "disconnected" });
        if (!settled) {
          settled = true;
          reject(new Error("connection closed before open"));
        }
      };
    });
  }

  close(): void {
    this.ws?.close();
  }

  sendAction(payload: ActionPayload): void {
    const { sessionId, turnId } = this.store.state;
    if (this.ws === null || sessionId === null || turnId === null) {
      return;
    }
    this.ws.send(actionMessage(sessionId, turnId, payload));
  }

  typeDraft(text: string): void {
    this.store.dispatch({ kind: "draft", text });
    this.sendAction({ kind: "type_draft", text });
  }

  sendDraft(): void {
    this.sendAction({ kind: "send_draft" });
  }

  pressDefault(index: number): void {
    this.sendAction({ kind: "press_default", index });
  }

  selectSuggestion(index: number): void {
    this.sendAction({ kind: "select_suggestion", index });
  }

  selectTranscript(index: number): void {
    this.store.dispatch({ kind: "clickTranscript", index });
    this.sendAction({ kind: "select_transcript", index });
  }
}
