/** Console entry point: connect, tick, render, wire inputs. */

import { ConsoleClient } from "./client.js";
import { render } from "./render.js";
import { ding, dong, setMuted } from "./sounds.js";
import { ConsoleStore } from "./state.js";

function consoleUrl(): string {
  const params = new URLSearchParams(window.location.search);
  const token = params.get("token") ?? "parley-dev";
  const host = params.get("relay") ?? window.location.host;
  return `ws://${host}/console?token=${encodeURIComponent(token)}`;
}

function main(): void {
  const store = new ConsoleStore();
  const client = new ConsoleClient(consoleUrl(), store);

  let lastCueSeq = -1;
  store.subscribe((state) => {
    if (state.lastCue !== null && state.lastSeq !== lastCueSeq) {
      if (state.lastCue === "new_message_ding") {
        ding();
        lastCueSeq = state.lastSeq;
      } else if (state.lastCue === "ten_seconds_dong") {
        dong();
        lastCueSeq = state.lastSeq;
      }
    }
    render(state, client);
  });

  const draft = document.getElementById("draft") as HTMLInputElement;
  let debounce: number | undefined;
  draft.addEventListener("input", () => {
    window.clearTimeout(debounce);
    debounce = window.setTimeout(() => client.typeDraft(draft.value), 200);
  });
  draft.addEventListener("keydown", (ev) => {
    if (ev.key === "Enter") {
      window.clearTimeout(debounce);
      client.typeDraft(draft.value);
      client.sendDraft();
    }
  });

  const memo = document.getElementById("memo") as HTMLTextAreaElement;
  memo.addEventListener("input", () => store.dispatch({ kind: "memo", text: memo.value }));

  const mute = document.getElementById("mute") as HTMLInputElement;
  mute.addEventListener("change", () => setMuted(mute.checked));

  window.setInterval(() => store.dispatch({ kind: "tick", nowMs: Date.now() }), 250);

  client.connect().catch(() => {
    const status = document.getElementById("status")!;
    status.textContent = "connection failed; check the relay address and token";
  });
}

main();
