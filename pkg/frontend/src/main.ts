import { bootstrap } from "./app.js";

const params = new URLSearchParams(window.location.search);
bootstrap(params.get("api") ?? "http://127.0.0.1:8000");
