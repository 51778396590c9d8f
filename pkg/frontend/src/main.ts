import { mountConsole } from "./app.js";

const root = document.getElementById("app");
if (!root) throw new Error("#app mount point missing");
mountConsole(root);
