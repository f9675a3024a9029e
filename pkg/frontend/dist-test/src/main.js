"use strict";
/** Console entry point: connect, tick, render, wire inputs. */
Object.defineProperty(exports, "__esModule", { value: true });
const client_js_1 = require("./client.js");
const render_js_1 = require("./render.js");
const sounds_js_1 = require("./sounds.js");
const state_js_1 = require("./state.js");
function consoleUrl() {
    const params = new URLSearchParams(window.location.search);
    const token = params.get("token") ?? "parley-dev";
    const host = params.get("relay") ?? window.location.host;
    return `ws://${host}/console?token=${encodeURIComponent(token)}`;
}
function main() {
    const store = new state_js_1.ConsoleStore();
    const client = new client_js_1.ConsoleClient(consoleUrl(), store);
    let lastCueSeq = -1;
    store.subscribe((state) => {
        if (state.lastCue !== null && state.lastSeq !== lastCueSeq) {
            if (state.lastCue === "new_message_ding") {
                (0, sounds_js_1.ding)();
                lastCueSeq = state.lastSeq;
            }
            else if (state.lastCue === "ten_seconds_dong") {
                (0, sounds_js_1.dong)();
                lastCueSeq = state.lastSeq;
            }
        }
        (0, render_js_1.render)(state, client);
    });
    const draft = document.getElementById("draft");
    let debounce;
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
    const memo = document.getElementById("memo");
    memo.addEventListener("input", () => store.dispatch({ kind: "memo", text: memo.value }));
    const mute = document.getElementById("mute");
    mute.addEventListener("change", () => (0, sounds_js_1.setMuted)(mute.checked));
    window.setInterval(() => store.dispatch({ kind: "tick", nowMs: Date.now() }), 250);
    client.connect().catch(() => {
        const status = document.getElementById("status");
        status.textContent = "connection failed; check the relay address and token";
    });
}
main();
