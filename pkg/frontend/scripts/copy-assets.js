// Copy static assets next to the compiled modules in dist/.
const fs = require("fs");
const path = require("path");

const pub = path.join(__dirname, "..", "public");
const dist = path.join(__dirname, "..", "dist");
fs.mkdirSync(dist, { recursive: true });
for (const name of fs.readdirSync(pub)) {
  fs.copyFileSync(path.join(pub, name), path.join(dist, name));
}
console.log("copied", fs.readdirSync(pub).join(", "));
