"use strict";
/** Wire message shapes, mirroring the relay's protocol.md. */
Object.defineProperty(exports, "__esModule", { value: true });
exports.parseMessage = parseMessage;
exports.actionMessage = actionMessage;
function parseMessage(data) {
    try {
        const msg = JSON.parse(data);
        if (msg && typeof msg.type === "string" && typeof msg.seq === "number") {
            return msg;
        }
    }
    catch {
        /* malformed frame: drop */
    }
    return null;
}
function actionMessage(sessionId, turnId, payload) {
    return JSON.stringify({
        type: "worker_action",
        session_id: sessionId,
        turn_id: turnId,
        payload,
    });
}
