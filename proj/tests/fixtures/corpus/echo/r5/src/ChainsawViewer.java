package com.example.viewer;

import org.apache.log4j.chainsaw.Main;

public class ChainsawViewer {}
