import { App } from "./app.js";

function apiBase(): string {
  const params = new URLSearchParams(window.location.search);
  const override = params.get("api");
  if (override) return override.replace(/\/+$/, "");
  return "http://127.0.0.1:8000";
}

const root = document.getElementById("app");
if (root === null) {
  throw new Error("missing #app mount point");
}
new App(root, { apiBase: apiBase() }).start();
