/** Short synthesized cue tones; no audio assets to bundle. */

let muted = false;
let ctx: AudioContext | null = null;

export function setMuted(value: boolean): void {
  muted = value;
}

export function isMuted(): boolean {
  return muted;
}

function context(): AudioContext | null {
  if (typeof AudioContext === "undefined") {
    return null;
  }
  if (ctx === null) {
    ctx = new AudioContext();
  }
  return ctx;
}

function beep(frequency: number, durationMs: number): void {
  if (muted) {
    return;
  }
  const audio = context();
  if (audio === null) {
    return;
  }
  const osc = audio.createOscillator();
  const gain = audio.createGain();
  osc.frequency.value = frequency;
  osc.connect(gain);
  gain.connect(audio.destination);
  gain.gain.setValueAtTime(0.15, audio.currentTime);
  gain.gain.exponentialRampToValueAtTime(0.001, audio.currentTime + durationMs / 1000);
  osc.start();
  osc.stop(audio.currentTime + durationMs / 1000);
}

/** New-message cue: one high ding. */
export function ding(): void {
  beep(880, 180);
}

/** Ten-seconds-left cue: one low dong. */
export function dong(): void {
  beep(330, 350);
}
