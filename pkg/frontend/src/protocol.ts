/** Wire message shapes, mirroring the relay's protocol.md. */

export type MessageType =
  | "skill_open"
  | "user_utterance"
  | "transcript_bundle"
  | "suggestion"
  | "cue"
  | "worker_action"
  | "system_response"
  | "skill_close"
  | "error";

export interface WireMessage {
  type: MessageType;
  seq: number;
  session_id: string | null;
  turn_id: string | null;
  at: number;
  payload: Record<string, unknown>;
}

export interface ActionPayload {
  kind: "type_draft" | "send_draft" | "press_default" | "select_suggestion" | "select_transcript";
  index?: number;
  text?: string;
}

export function parseMessage(data: string): WireMessage | null {
  try {
    const msg = JSON.parse(data);
    if (msg && typeof msg.type === "string" && typeof msg.seq === "number") {
      return msg as WireMessage;
    }
  } catch {
    /* malformed frame: drop */
  }
  return null;
}

export function actionMessage(
  sessionId: string,
  turnId: string,
  payload: ActionPayload,
): string {
  return JSON.stringify({
    type: "worker_action",
    session_id: sessionId,
    turn_id: turnId,
    payload,
  });
}
