import { ApiClient } from "./api.js";
import { App } from "./app.js";

const params = new URLSearchParams(window.location.search);
const baseUrl = params.get("api") ?? "";

const root = document.getElementById("app");
if (root === null) throw new Error("missing #app container");

const app = new App(root, new ApiClient(baseUrl));
void app.start();
