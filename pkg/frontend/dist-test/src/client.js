"use strict";
/**
 * WebSocket glue between the relay's /console endpoint and the store.
 *
 * The WebSocket constructor is injectable so tests can run the client
 * against a stub server under Node with the `ws` package.
 */
Object.defineProperty(exports, "__esModule", { value: true });
exports.ConsoleClient = void 0;
const protocol_js_1 = require("./protocol.js");
class ConsoleClient {
    constructor(url, store, wsCtor = globalThis.WebSocket) {
        this.url = url;
        this.store = store;
        this.wsCtor = wsCtor;
        this.ws = null;
    }
    connect() {
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
                const msg = (0, protocol_js_1.parseMessage)(String(ev.data));
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
    close() {
        this.ws?.close();
    }
    sendAction(payload) {
        const { sessionId, turnId } = this.store.state;
        if (this.ws === null || sessionId === null || turnId === null) {
            return;
        }
        this.ws.send((0, protocol_js_1.actionMessage)(sessionId, turnId, payload));
    }
    typeDraft(text) {
        this.store.dispatch({ kind: "draft", text });
        this.sendAction({ kind: "type_draft", text });
    }
    sendDraft() {
        this.sendAction({ kind: "send_draft" });
    }
    pressDefault(index) {
        this.sendAction({ kind: "press_default", index });
    }
    selectSuggestion(index) {
        this.sendAction({ kind: "select_suggestion", index });
    }
    selectTranscript(index) {
        this.store.dispatch({ kind: "clickTranscript", index });
        this.sendAction({ kind: "select_transcript", index });
    }
}
exports.ConsoleClient = ConsoleClient;
