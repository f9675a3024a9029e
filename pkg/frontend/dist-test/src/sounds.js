"use strict";
/** Short synthesized cue tones; no audio assets to bundle. */
Object.defineProperty(exports, "__esModule", { value: true });
exports.setMuted = setMuted;
exports.isMuted = isMuted;
exports.ding = ding;
exports.dong = dong;
let muted = false;
let ctx = null;
function setMuted(value) {
    muted = value;
}
function isMuted() {
    return muted;
}
function context() {
    if (typeof AudioContext === "undefined") {
        return null;
    }
    if (ctx === null) {
        ctx = new AudioContext();
    }
    return ctx;
}
function beep(frequency, durationMs) {
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
function ding() {
    beep(880, 180);
}
/** Ten-seconds-left cue: one low dong. */
function dong() {
    beep(330, 350);
}
