"use strict";
/** DOM rendering: pure function of the console state. */
Object.defineProperty(exports, "__esModule", { value: true });
exports.render = render;
const state_js_1 = require("./state.js");
function el(tag, className, text) {
    const node = document.createElement(tag);
    if (className) {
        node.className = className;
    }
    if (text !== undefined) {
        node.textContent = text;
    }
    return node;
}
function render(state, client) {
    renderHistory(state);
    renderActiveTurn(state, client);
    renderReplyPane(state, client);
    renderStatus(state);
}
function renderStatus(state) {
    const node = document.getElementById("status");
    node.textContent = state.connected
        ? state.skillOpen
            ? `session ${state.sessionId}`
            : "connected, waiting for a session"
        : "disconnected";
    const timer = document.getElementById("timer");
    const seconds = (0, state_js_1.countdownSeconds)(state);
    timer.textContent = seconds === null ? "--" : String(seconds);
    timer.classList.toggle("urgent", seconds !== null && seconds <= 10);
}
function renderHistory(state) {
    const node = document.getElementById("history");
    node.replaceChildren(...state.history.flatMap((entry) => [
        el("div", "msg user", entry.userText),
        el("div", "msg worker", entry.responseText),
    ]));
}
function renderActiveTurn(state, client) {
    const node = document.getElementById("active-turn");
    node.replaceChildren();
    state.variants.forEach((variant, index) => {
        const row = el("button", "variant" + (variant.color ? ` alt-${variant.color}` : " original"));
        row.textContent = variant.text;
        if (index === state.selectedVariant) {
            row.classList.add("selected");
        }
        row.onclick = () => client.selectTranscript(index);
        node.append(row);
    });
}
function renderReplyPane(state, client) {
    const lock = document.getElementById("lock-banner");
    const text = (0, state_js_1.lockText)(state);
    lock.textContent = text ?? "";
    lock.classList.toggle("hidden", text === null);
    const suggestions = document.getElementById("suggestions");
    suggestions.replaceChildren(...state.suggestions.map((s, index) => {
        const btn = el("button", "suggestion", s.text);
        btn.disabled = (0, state_js_1.suggestionsDisabled)(state) || state.turnId === null;
        btn.title = `for transcript ${s.variantIndex}`;
        btn.onclick = () => client.selectSuggestion(index);
        return btn;
    }));
    const defaults = document.getElementById("defaults");
    if (defaults.childElementCount === 0) {
        state_js_1.DEFAULT_RESPONSES.forEach((textContent, index) => {
            const btn = el("button", "default-btn", textContent);
            btn.onclick = () => client.pressDefault(index);
            defaults.append(btn);
        });
    }
    for (const btn of Array.from(defaults.children)) {
        btn.disabled = state.turnId === null;
    }
    const draft = document.getElementById("draft");
    if (draft.value !== state.draft) {
        draft.value = state.draft;
    }
    draft.disabled = state.turnId === null;
    const notices = document.getElementById("notices");
    notices.replaceChildren(...state.notices.map((n) => el("div", "notice", n)));
    const last = document.getElementById("last-response");
    last.textContent = state.lastResponse ? `sent: ${state.lastResponse}` : "";
}
